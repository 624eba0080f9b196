use nalgebra::{DMatrix, DVector};

use super::Heightmap;
use crate::error::{Error, Result};
use crate::linalg::{legendre, solve_normal, unit_coord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArealForm {
    Plane,
    Poly2,
    Poly5,
}

impl ArealForm {
    pub fn degree(&self) -> usize {
        match self {
            ArealForm::Plane => 1,
            ArealForm::Poly2 => 2,
            ArealForm::Poly5 => 5,
        }
    }
}

impl std::str::FromStr for ArealForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane" => Ok(ArealForm::Plane),
            "poly2" => Ok(ArealForm::Poly2),
            "poly5" => Ok(ArealForm::Poly5),
            other => Err(Error::InvalidParams(format!("unknown areal form '{other}'"))),
        }
    }
}

/// Remove a least-squares polynomial surface of total degree ≤ d, built on
/// tensor Legendre terms `P_a(x)·P_b(y)`, `a + b ≤ d`.
pub fn remove_form_areal(map: &Heightmap, form: ArealForm) -> Result<Heightmap> {
    let d = form.degree();
    let terms: Vec<(usize, usize)> = (0..=d).flat_map(|a| (0..=d - a).map(move |b| (a, b))).collect();
    let m = terms.len();
    if map.len() < m + 2 {
        return Err(Error::InsufficientData(format!("{m}-term surface fit needs {} samples", m + 2)));
    }
    let mut px = vec![vec![0.0; d + 1]; map.nx];
    for (i, p) in px.iter_mut().enumerate() {
        legendre(d, unit_coord(i, map.nx), p);
    }
    let mut py = vec![vec![0.0; d + 1]; map.ny];
    for (i, p) in py.iter_mut().enumerate() {
        legendre(d, unit_coord(i, map.ny), p);
    }
    let mut ata = DMatrix::<f64>::zeros(m, m);
    let mut atb = DVector::<f64>::zeros(m);
    let mut row = vec![0.0; m];
    for iy in 0..map.ny {
        for ix in 0..map.nx {
            for (k, &(a, b)) in terms.iter().enumerate() {
                row[k] = px[ix][a] * py[iy][b];
            }
            let zi = map.at(ix, iy);
            for a in 0..m {
                atb[a] += row[a] * zi;
                for b in a..m {
                    ata[(a, b)] += row[a] * row[b];
                }
            }
        }
    }
    for a in 0..m {
        for b in 0..a {
            ata[(a, b)] = ata[(b, a)];
        }
    }
    let coef = solve_normal(ata, atb)?;
    let mut z = Vec::with_capacity(map.len());
    for iy in 0..map.ny {
        for ix in 0..map.nx {
            let fit: f64 = terms
                .iter()
                .zip(coef.iter())
                .map(|(&(a, b), c)| c * px[ix][a] * py[iy][b])
                .sum();
            z.push(map.at(ix, iy) - fit);
        }
    }
    let m0 = crate::profile::mean(&z);
    z.iter_mut().for_each(|v| *v -= m0);
    Ok(map.with_z(z))
}
