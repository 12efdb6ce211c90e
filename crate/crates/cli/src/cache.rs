//! Content-addressed binary cache of eigenpairs.
//!
//! One file per key, `<key>.eig`: magic, key, states, then the SHA-256 of
//! everything before it. Files are written once to a temporary name and
//! renamed into place, so concurrent runs sharing a directory never see a
//! partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use surftrap_core::EigenState;

use crate::error::CliError;

const MAGIC: &[u8; 16] = b"SURFTRAP-EIGEN01";
const DIGEST_LEN: usize = 32;

/// Key of one computation stage: the hash of its canonical description.
pub fn stage_key<T: Serialize>(stage: &T) -> String {
    let text = serde_json::to_string(stage).expect("stage description serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// `f64` as exact bit pattern, for keys that must not depend on formatting.
pub fn bits(x: f64) -> String {
    format!("{:016x}", x.to_bits())
}

#[derive(Debug, Clone)]
pub struct EigenCache {
    dir: Option<PathBuf>,
}

impl EigenCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    pub fn disabled() -> Self {
        Self { dir: None }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.eig")))
    }

    pub fn load(&self, key: &str) -> Result<Option<Vec<EigenState>>, CliError> {
        let Some(path) = self.path(key) else {
            return Ok(None);
        };
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        decode(&bytes, key)
            .map(Some)
            .map_err(|m| CliError::Cache(format!("{}: {m}", path.display())))
    }

    pub fn store(&self, key: &str, states: &[EigenState]) -> Result<(), CliError> {
        let Some(path) = self.path(key) else {
            return Ok(());
        };
        if path.exists() {
            return Ok(());
        }
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir)?;
        write_atomic(&path, &encode(states, key))
    }

    /// Cached states for `key`, computing and storing them on a miss.
    /// The flag reports a hit.
    pub fn get_or_compute<F>(&self, key: &str, compute: F) -> Result<(Vec<EigenState>, bool), CliError>
    where
        F: FnOnce() -> Result<Vec<EigenState>, CliError>,
    {
        if let Some(s) = self.load(key)? {
            log::info!("eigenpairs {key} loaded from cache");
            return Ok((s, true));
        }
        log::info!("eigenpairs {key} not cached; solving");
        let states = compute()?;
        self.store(key, &states)?;
        Ok((states, false))
    }
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path.file_name().map_or("out".into(), |n| n.to_string_lossy().into_owned());
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.subsec_nanos());
    let tmp = dir.join(format!(".{name}.{}.{nanos}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn encode(states: &[EigenState], key: &str) -> Vec<u8> {
    let len: usize = states.iter().map(|s| 96 + 8 * s.psi.len()).sum();
    let mut out = Vec::with_capacity(MAGIC.len() + key.len() + 16 + len + DIGEST_LEN);
    out.extend_from_slice(MAGIC);
    put_u64(&mut out, key.len() as u64);
    out.extend_from_slice(key.as_bytes());
    put_u64(&mut out, states.len() as u64);
    for s in states {
        for v in [s.energy, s.origin, s.spacing, s.centroid, s.spread, s.edge_mass, s.outside_mass] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        put_u64(&mut out, s.well_index as u64);
        put_u64(&mut out, s.band_index as u64);
        out.push(s.degenerate as u8);
        out.push(s.outside_warning as u8);
        put_u64(&mut out, s.psi.len() as u64);
        for p in &s.psi {
            out.extend_from_slice(&p.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.buf.len());
        let end = end.ok_or("truncated record")?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn flag(&mut self) -> Result<bool, String> {
        match self.take(1)?[0] {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(format!("bad flag byte {b}")),
        }
    }
}

fn decode(bytes: &[u8], key: &str) -> Result<Vec<EigenState>, String> {
    if bytes.len() < MAGIC.len() + DIGEST_LEN || &bytes[..MAGIC.len()] != MAGIC {
        return Err("not an eigenpair cache file".into());
    }
    let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
    if Sha256::digest(body).as_slice() != digest {
        return Err("checksum mismatch".into());
    }
    let mut r = Reader {
        buf: body,
        pos: MAGIC.len(),
    };
    let klen = r.u64()? as usize;
    if r.take(klen)? != key.as_bytes() {
        return Err("stored key differs from file name".into());
    }
    let count = r.u64()? as usize;
    let mut states = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let [energy, origin, spacing, centroid, spread, edge_mass, outside_mass] =
            [r.f64()?, r.f64()?, r.f64()?, r.f64()?, r.f64()?, r.f64()?, r.f64()?];
        let well_index = r.u64()? as usize;
        let band_index = r.u64()? as usize;
        let degenerate = r.flag()?;
        let outside_warning = r.flag()?;
        let n = r.u64()? as usize;
        let raw = r.take(n.checked_mul(8).ok_or("bad length")?)?;
        let psi = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        states.push(EigenState {
            energy,
            origin,
            spacing,
            psi,
            well_index,
            band_index,
            centroid,
            spread,
            edge_mass,
            degenerate,
            outside_mass,
            outside_warning,
        });
    }
    if r.pos != body.len() {
        return Err("trailing bytes".into());
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<EigenState> {
        (1..=3)
            .map(|k| EigenState {
                energy: 1.0 / k as f64,
                origin: 0.1,
                spacing: 0.1,
                psi: (0..10).map(|i| (i * k) as f64 * 1e-3).collect(),
                well_index: k,
                band_index: 1,
                centroid: k as f64,
                spread: 0.2,
                edge_mass: 1e-30,
                degenerate: k == 2,
                outside_mass: 0.0,
                outside_warning: false,
            })
            .collect()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = sample();
        assert_eq!(decode(&encode(&s, "k"), "k").unwrap(), s);
    }

    #[test]
    fn any_flipped_byte_is_detected() {
        let bytes = encode(&sample(), "k");
        for i in (0..bytes.len()).step_by(17) {
            let mut b = bytes.clone();
            b[i] ^= 0x40;
            assert!(decode(&b, "k").is_err(), "byte {i}");
        }
        assert!(decode(&bytes[..bytes.len() - 1], "k").is_err());
        assert!(decode(&bytes, "other").is_err());
    }

    #[test]
    fn store_is_write_once() {
        let dir = std::env::temp_dir().join(format!("surftrap-cache-test-{}", std::process::id()));
        let c = EigenCache::new(Some(dir.clone()));
        let s = sample();
        c.store("a", &s).unwrap();
        c.store("a", &s[..1]).unwrap();
        assert_eq!(c.load("a").unwrap().unwrap().len(), 3);
        assert!(c.load("b").unwrap().is_none());
        fs::remove_dir_all(dir).unwrap();
    }
}
