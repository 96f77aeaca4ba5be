//! On-disk cache of enumerated quotients.
//!
//! File layout (little endian): magic `BDQC`, format version (u32), key
//! length (u32) and key bytes, element count (u64), words per element (u32),
//! sphere count (u32) and sphere sizes (u64 each), then the packed table.
//! The file name is the SHA-256 of the key.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{EnumerateOptions, FiniteGroup, FiniteQuotient, QuotientKind};
use crate::error::{Error, Result};
use crate::words::{symmetrize, GeneratorWord, GroupSpec};

const MAGIC: &[u8; 4] = b"BDQC";
const VERSION: u32 = 1;

fn cache_key(group: GroupSpec, kind: QuotientKind, gens: &[GeneratorWord]) -> String {
    let gens = if gens.is_empty() {
        group.standard_generators()
    } else {
        gens.to_vec()
    };
    let words: Vec<String> = symmetrize(&gens).iter().map(|w| w.to_string()).collect();
    format!("{group};{kind};{}", words.join(","))
}

fn cache_path(dir: &Path, key: &str) -> PathBuf {
    let digest = Sha256::digest(key.as_bytes());
    dir.join(format!("{}.bdq", hex::encode(digest)))
}

pub fn save(q: &FiniteQuotient, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let key = cache_key(q.group(), q.kind(), q.generator_words());
    let path = cache_path(dir, &key);
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(key.len() as u32).to_le_bytes());
    buf.extend_from_slice(key.as_bytes());
    buf.extend_from_slice(&(q.order() as u64).to_le_bytes());
    buf.extend_from_slice(&(q.words_per_element() as u32).to_le_bytes());
    buf.extend_from_slice(&(q.spheres().len() as u32).to_le_bytes());
    for &s in q.spheres() {
        buf.extend_from_slice(&(s as u64).to_le_bytes());
    }
    for &w in q.packed_table() {
        buf.extend_from_slice(&w.to_le_bytes());
    }
    // write then rename, so readers never see a partial file
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&buf)?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Io("cache file is truncated".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Loads a cached quotient if a matching file exists.
pub fn load(
    dir: &Path,
    group: GroupSpec,
    kind: QuotientKind,
    gens: &[GeneratorWord],
    opts: &EnumerateOptions,
) -> Result<Option<FiniteQuotient>> {
    let key = cache_key(group, kind, gens);
    let path = cache_path(dir, &key);
    let mut buf = Vec::new();
    match fs::File::open(&path) {
        Ok(mut f) => {
            f.read_to_end(&mut buf)?;
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    let mut r = Reader { buf: &buf, pos: 0 };
    if r.take(4)? != MAGIC || r.u32()? != VERSION {
        return Err(Error::Io(format!("{} is not a quotient cache file", path.display())));
    }
    let klen = r.u32()? as usize;
    if r.take(klen)? != key.as_bytes() {
        return Err(Error::Io(format!("{} was written for another quotient", path.display())));
    }
    let order = r.u64()? as usize;
    if order > opts.max_elements {
        return Err(Error::PartialEnumeration {
            reached: order,
            cap: opts.max_elements,
        });
    }
    let words = r.u32()? as usize;
    let ns = r.u32()? as usize;
    let spheres = (0..ns).map(|_| r.u64().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
    let mut data = Vec::with_capacity(order * words);
    for _ in 0..order * words {
        data.push(r.u64()?);
    }
    let q = FiniteQuotient::from_table(group, kind, gens, data, spheres, opts)?;
    if q.words_per_element() != words {
        return Err(Error::Io("cache file uses another packing".into()));
    }
    Ok(Some(q))
}

/// Enumerates through the cache directory when one is given.
pub fn enumerate_cached(
    group: GroupSpec,
    gens: &[GeneratorWord],
    kind: QuotientKind,
    opts: &EnumerateOptions,
    dir: Option<&Path>,
) -> Result<FiniteQuotient> {
    if let Some(dir) = dir {
        if let Some(q) = load(dir, group, kind, gens, opts)? {
            return Ok(q);
        }
        let q = FiniteQuotient::enumerate(group, gens, kind, opts)?;
        save(&q, dir)?;
        return Ok(q);
    }
    FiniteQuotient::enumerate(group, gens, kind, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = GroupSpec::gupta_sidki(3).unwrap();
        let kind = QuotientKind::BranchPower(1);
        let opts = EnumerateOptions::default();
        let q = enumerate_cached(g, &[], kind, &opts, Some(dir.path())).unwrap();
        let r = load(dir.path(), g, kind, &[], &opts).unwrap().unwrap();
        assert_eq!(q.order(), r.order());
        assert_eq!(q.packed_table(), r.packed_table());
        assert_eq!(q.spheres(), r.spheres());
        for e in 0..q.order() as u32 {
            for s in 0..q.generator_elements().len() {
                assert_eq!(q.mul_gen(e, s), r.mul_gen(e, s));
            }
        }
        assert!(load(dir.path(), g, QuotientKind::BranchPower(0), &[], &opts)
            .unwrap()
            .is_none());
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let g = GroupSpec::grigorchuk();
        let kind = QuotientKind::LevelStabilizer(2);
        let key = cache_key(g, kind, &[]);
        fs::write(cache_path(dir.path(), &key), b"nonsense").unwrap();
        assert!(load(dir.path(), g, kind, &[], &EnumerateOptions::default()).is_err());
    }
}
