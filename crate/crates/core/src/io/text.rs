//! Plain-text heightmap and profile files.
//!
//! Heightmap:
//!
//! ```text
//! # nx=600 ny=600 dx_um=5 dy_um=5
//! # flank=drive
//! <ny rows of nx heights, μm>
//! ```
//!
//! Profile: optional `# key=value` lines, then rows of `x_um z_um`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::sig;
use crate::areal::Heightmap;
use crate::error::{Error, Result};
use crate::profile::{Profile, ProfileKind};

pub fn heightmap_to_string(map: &Heightmap) -> String {
    let mut out = String::with_capacity(map.len() * 16 + 64);
    writeln!(out, "# nx={} ny={} dx_um={} dy_um={}", map.nx, map.ny, sig(map.dx), sig(map.dy)).unwrap();
    for (k, v) in &map.metadata {
        writeln!(out, "# {k}={v}").unwrap();
    }
    for iy in 0..map.ny {
        let row: Vec<String> = map.row(iy).iter().map(|&v| sig(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_meta(line: &str) -> Option<(&str, &str)> {
    let body = line.strip_prefix('#')?.trim();
    body.split_once('=').map(|(k, v)| (k.trim(), v.trim()))
}

fn parse_value(tok: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(path, line, format!("'{tok}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

/// `path` only labels error messages.
pub fn heightmap_from_str(text: &str, path: &Path) -> Result<Heightmap> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, head) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let mut dims: BTreeMap<&str, &str> = BTreeMap::new();
    let body = head
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(path, 1, "missing '# nx=.. ny=.. dx_um=.. dy_um=..' header"))?;
    for tok in body.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(path, 1, format!("malformed header token '{tok}'")))?;
        dims.insert(k, v);
    }
    let field = |k: &str| {
        dims.get(k)
            .copied()
            .ok_or_else(|| Error::parse(path, 1, format!("header is missing '{k}'")))
    };
    let count = |k: &str| -> Result<usize> {
        field(k)?
            .parse()
            .map_err(|_| Error::parse(path, 1, format!("'{k}' must be a positive integer")))
    };
    let nx = count("nx")?;
    let ny = count("ny")?;
    let dx = parse_value(field("dx_um")?, path, 1)?;
    let dy = parse_value(field("dy_um")?, path, 1)?;

    let mut metadata = BTreeMap::new();
    let mut z = Vec::with_capacity(nx * ny);
    let mut rows = 0;
    for (ln, line) in lines {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            if rows > 0 {
                return Err(Error::parse(path, ln, "metadata line after data rows"));
            }
            let (k, v) = parse_meta(t).ok_or_else(|| Error::parse(path, ln, "metadata must be '# key=value'"))?;
            metadata.insert(k.to_string(), v.to_string());
            continue;
        }
        rows += 1;
        if rows > ny {
            return Err(Error::parse(path, ln, format!("more than ny={ny} rows")));
        }
        let before = z.len();
        for tok in t.split_whitespace() {
            z.push(parse_value(tok, path, ln)?);
        }
        let got = z.len() - before;
        if got != nx {
            return Err(Error::parse(
                path,
                ln,
                format!("row {} has {got} values, expected nx={nx}", rows - 1),
            ));
        }
    }
    if rows != ny {
        return Err(Error::parse(path, text.lines().count(), format!("found {rows} rows, expected ny={ny}")));
    }
    let mut map = Heightmap::new(nx, ny, dx, dy, z).map_err(|e| Error::parse(path, 1, e.to_string()))?;
    map.metadata = metadata;
    Ok(map)
}

pub fn write_heightmap(path: &Path, map: &Heightmap) -> Result<()> {
    std::fs::write(path, heightmap_to_string(map)).map_err(|e| Error::io(path, e))
}

pub fn read_heightmap(path: &Path) -> Result<Heightmap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    heightmap_from_str(&text, path)
}

pub fn profile_to_string(profile: &Profile) -> String {
    let mut out = String::with_capacity(profile.len() * 32 + 64);
    writeln!(out, "# kind={}", profile.kind().as_str()).unwrap();
    writeln!(out, "# x_um z_um").unwrap();
    for (i, &v) in profile.z().iter().enumerate() {
        writeln!(out, "{} {}", sig(profile.x(i)), sig(v)).unwrap();
    }
    out
}

pub fn profile_from_str(text: &str, path: &Path) -> Result<Profile> {
    let mut kind = ProfileKind::Primitive;
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    let mut first_row = 0;
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            if let Some(("kind", v)) = parse_meta(t) {
                kind = v.parse().map_err(|e: Error| Error::parse(path, ln, e.to_string()))?;
            }
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::parse(path, ln, format!("expected 2 columns, found {}", toks.len())));
        }
        if first_row == 0 {
            first_row = ln;
        }
        xs.push(parse_value(toks[0], path, ln)?);
        zs.push(parse_value(toks[1], path, ln)?);
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::parse(path, first_row.max(1), format!("need at least 2 rows, found {n}")));
    }
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if !(dx > 0.0) {
        return Err(Error::parse(path, first_row, "x must increase"));
    }
    let (worst, at) = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| ((x - xs[0] - i as f64 * dx).abs(), i))
        .fold((0.0, 0), |b, c| if c.0 > b.0 { c } else { b });
    let scale = xs[0].abs().max(xs[n - 1].abs());
    if worst > 1e-6 * dx + 1e-8 * scale {
        return Err(Error::parse(
            path,
            first_row + at,
            format!("non-uniform x spacing: max deviation {} um from a {} um step", sig(worst), sig(dx)),
        ));
    }
    Profile::new(zs, dx, kind).map_err(|e| Error::parse(path, first_row, e.to_string()))
}

pub fn write_profile(path: &Path, profile: &Profile) -> Result<()> {
    std::fs::write(path, profile_to_string(profile)).map_err(|e| Error::io(path, e))
}

pub fn read_profile(path: &Path) -> Result<Profile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    profile_from_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("mem")
    }

    #[test]
    fn heightmap_round_trip_is_stable() {
        let mut map = Heightmap::from_fn(20, 17, 5.0, 2.5, |x, y| (0.013 * x).sin() * 1e3 + y * 1e-7).unwrap();
        map.metadata.insert("flank".into(), "drive".into());
        let a = heightmap_to_string(&map);
        let back = heightmap_from_str(&a, p()).unwrap();
        assert_eq!(back.metadata, map.metadata);
        for (u, v) in back.z.iter().zip(&map.z) {
            assert!((u - v).abs() <= 1e-8 * v.abs().max(1e-300));
        }
        assert_eq!(heightmap_to_string(&back), a);
    }

    #[test]
    fn ragged_row_names_the_row() {
        let map = Heightmap::from_fn(16, 16, 1.0, 1.0, |x, _| x).unwrap();
        let mut text = heightmap_to_string(&map);
        text = text.replacen("\n0.00000000e0 ", "\n", 1);
        let err = heightmap_from_str(&text, p()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 0 has 15 values"), "{msg}");
        assert!(msg.contains("mem:2:"), "{msg}");
    }

    #[test]
    fn header_errors() {
        assert!(heightmap_from_str("1 2 3\n", p()).is_err());
        assert!(heightmap_from_str("# nx=16 ny=16 dx_um=1\n", p()).is_err());
        let e = heightmap_from_str("# nx=16 ny=16 dx_um=1 dy_um=1\n", p()).unwrap_err();
        assert!(e.to_string().contains("found 0 rows"));
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let map = Heightmap::from_fn(16, 16, 1.0, 1.0, |x, _| x + 1.0).unwrap();
        let text = heightmap_to_string(&map).replacen("1.00000000e0", "NaN", 1);
        assert!(heightmap_from_str(&text, p()).is_err());
    }

    #[test]
    fn profile_round_trip_and_length() {
        let prof = Profile::from_fn(80, 33.64, |x| (x / 200.0).sin()).unwrap();
        let text = profile_to_string(&prof);
        let back = profile_from_str(&text, p()).unwrap();
        assert_eq!(back.len(), 80);
        assert!((back.length() - 2657.56).abs() < 1e-6);
        assert_eq!(profile_to_string(&back), text);
    }

    #[test]
    fn non_uniform_spacing_is_rejected() {
        let mut text = String::new();
        for i in 0..20 {
            let x = if i == 7 { 7.3 } else { i as f64 };
            text.push_str(&format!("{x} 0\n"));
        }
        let msg = profile_from_str(&text, p()).unwrap_err().to_string();
        assert!(msg.contains("non-uniform x spacing: max deviation 3.00000000e-1"), "{msg}");
    }
}
