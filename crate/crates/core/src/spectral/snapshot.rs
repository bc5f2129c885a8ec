//! Binary field snapshots.
//!
//! The payload is little-endian `f64` pairs `(re, im)`, component-major, then
//! row-major over `k1 in [-N, N]`, `k2 in [-N, N]`. A sidecar text file
//! (`<payload>.meta`) carries `n_modes`, `components`, `time` and `config_hash`
//! as `key = value` lines.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::{GridSpec, SpectralField};
use crate::error::FieldError;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMeta {
    pub n_modes: usize,
    pub components: usize,
    pub time: f64,
    pub config_hash: String,
}

pub fn meta_path(payload: &Path) -> PathBuf {
    let mut s = payload.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn encode(field: &SpectralField) -> Vec<u8> {
    let mut out = Vec::with_capacity(field.coeffs().len() * 16);
    for z in field.coeffs() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8], grid: GridSpec, components: usize) -> Result<SpectralField, FieldError> {
    let expected = components * grid.len() * 16;
    if bytes.len() != expected {
        return Err(FieldError::Snapshot(format!("payload has {} bytes, expected {expected}", bytes.len())));
    }
    let coeffs = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    SpectralField::from_coeffs(grid, components, coeffs)
}

impl SnapshotMeta {
    pub fn to_text(&self) -> String {
        format!(
            "n_modes = {}\ncomponents = {}\ntime = {:?}\nconfig_hash = \"{}\"\n",
            self.n_modes, self.components, self.time, self.config_hash
        )
    }

    pub fn parse(text: &str) -> Result<Self, FieldError> {
        let mut n_modes = None;
        let mut components = None;
        let mut time = None;
        let mut config_hash = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || FieldError::Snapshot(format!("metadata line {}: `{line}`", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(bad)?;
            let value = value.trim();
            match key.trim() {
                "n_modes" => n_modes = Some(value.parse().map_err(|_| bad())?),
                "components" => components = Some(value.parse().map_err(|_| bad())?),
                "time" => time = Some(value.parse().map_err(|_| bad())?),
                "config_hash" => config_hash = Some(value.trim_matches('"').to_string()),
                _ => return Err(bad()),
            }
        }
        let missing = |k: &str| FieldError::Snapshot(format!("metadata is missing `{k}`"));
        Ok(Self {
            n_modes: n_modes.ok_or_else(|| missing("n_modes"))?,
            components: components.ok_or_else(|| missing("components"))?,
            time: time.ok_or_else(|| missing("time"))?,
            config_hash: config_hash.ok_or_else(|| missing("config_hash"))?,
        })
    }
}

pub fn write(path: &Path, field: &SpectralField, time: f64, config_hash: &str) -> Result<(), FieldError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(&encode(field))?;
    w.flush()?;
    let meta = SnapshotMeta {
        n_modes: field.n_modes(),
        components: field.components(),
        time,
        config_hash: config_hash.to_string(),
    };
    fs::write(meta_path(path), meta.to_text())?;
    Ok(())
}

pub fn read(path: &Path) -> Result<(SpectralField, SnapshotMeta), FieldError> {
    let meta = SnapshotMeta::parse(&fs::read_to_string(meta_path(path))?)?;
    let grid = GridSpec::new(meta.n_modes)?;
    let field = decode(&fs::read(path)?, grid, meta.components)?;
    Ok((field, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_divergence_free;

    #[test]
    fn layout_is_component_major_row_major() {
        let g = GridSpec::new(1).unwrap();
        let mut f = SpectralField::zeros_vector(g);
        f.set_pair(1, -1, 0, Complex64::new(2.0, 3.0));
        let bytes = encode(&f);
        assert_eq!(bytes.len(), 2 * 9 * 16);
        // component 1, k1 = -1, k2 = 0 -> offset 9 + 0 * 3 + 1
        let off = (9 + 1) * 16;
        assert_eq!(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()), 2.0);
        assert_eq!(f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap()), 3.0);
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("sveuler-snap-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("u.bin");
        let f = random_divergence_free(GridSpec::new(5).unwrap(), 5, 1.0, 1);
        write(&path, &f, 0.25, "abc123").unwrap();
        let (g, meta) = read(&path).unwrap();
        assert_eq!(g, f);
        assert_eq!(meta.time, 0.25);
        assert_eq!(meta.config_hash, "abc123");
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rejects_truncated_payload() {
        let g = GridSpec::new(2).unwrap();
        assert!(decode(&[0u8; 10], g, 2).is_err());
        assert!(SnapshotMeta::parse("n_modes = 4\n").is_err());
        assert!(SnapshotMeta::parse("bogus = 1\n").is_err());
    }
}
