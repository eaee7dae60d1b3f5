use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::{EmbeddingMatrix, SubwordTable};
use crate::error::{Error, Result};
use crate::io::{atomic_write, open_lines};
use crate::num::Scalar;

const MAGIC: &[u8; 8] = b"FSSUBWRD";
const VERSION: u32 = 1;

/// Subword data for `vectors.txt` lives next to it in `vectors.txt.subword`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(".subword");
    PathBuf::from(s)
}

/// Word2vec text format plus, for subword models, a binary sidecar.
pub fn save_embeddings<T: Scalar>(matrix: &EmbeddingMatrix<T>, path: &Path) -> Result<()> {
    let dim = matrix.dim();
    atomic_write(path, |w| {
        writeln!(w, "{} {}", matrix.len(), dim)?;
        for (i, word) in matrix.words().iter().enumerate() {
            w.write_all(word.as_bytes())?;
            for x in matrix.row(i) {
                write!(w, " {x}")?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    let side = sidecar_path(path);
    match matrix.subword() {
        Some(t) => atomic_write(&side, |w| write_sidecar(w, t, dim, matrix.len())),
        None if side.exists() => fs::remove_file(&side).map_err(|e| Error::io(&side, e)),
        None => Ok(()),
    }
}

pub fn load_embeddings<T: Scalar>(path: &Path) -> Result<EmbeddingMatrix<T>> {
    let mut lines = open_lines(path)?;
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(path, 1, "missing \"<words> <dim>\" header"))?;
    let header = header?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parsed = match fields.as_slice() {
        [n, d] => n.parse::<usize>().ok().zip(d.parse::<usize>().ok()),
        _ => None,
    };
    let (n, dim) = parsed.ok_or_else(|| Error::format(path, 1, format!("bad header {header:?}")))?;
    if dim == 0 {
        return Err(Error::format(path, 1, "dim must be at least 1"));
    }

    let mut words = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * dim);
    let mut last = 1;
    for (line_no, line) in lines {
        let line = line?;
        last = line_no;
        if line.trim().is_empty() {
            continue;
        }
        if words.len() == n {
            return Err(Error::format(path, line_no, format!("header declares {n} words but the body has more")));
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-empty line");
        let before = vectors.len();
        for p in parts {
            let x = T::from_str_radix(p, 10)
                .map_err(|_| Error::format(path, line_no, format!("bad number {p:?}")))?;
            if !x.is_finite() {
                return Err(Error::format(path, line_no, format!("non-finite value {p:?}")));
            }
            vectors.push(x);
        }
        let got = vectors.len() - before;
        if got != dim {
            return Err(Error::format(path, line_no, format!("expected {dim} values, found {got}")));
        }
        words.push(word.to_owned());
    }
    if words.len() != n {
        return Err(Error::format(
            path,
            last + 1,
            format!("header declares {n} words but the body has {}", words.len()),
        ));
    }
    let matrix = EmbeddingMatrix::new(words, dim, vectors).map_err(|e| Error::format(path, 1, e.to_string()))?;

    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(matrix);
    }
    let bytes = fs::read(&side).map_err(|e| Error::io(&side, e))?;
    let table = read_sidecar(&bytes, dim, n).map_err(|m| Error::format(&side, 0, m))?;
    matrix.with_subword(table)
}

fn write_sidecar<T: Scalar>(w: &mut dyn Write, t: &SubwordTable<T>, dim: usize, words: usize) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for v in [dim as u64, words as u64, t.min_n as u64, t.max_n as u64, u64::from(t.buckets), t.bucket_ids.len() as u64] {
        w.write_all(&v.to_le_bytes())?;
    }
    for id in &t.bucket_ids {
        w.write_all(&id.to_le_bytes())?;
    }
    for x in t.word_inputs.iter().chain(&t.bucket_rows) {
        w.write_all(&x.as_f64().to_le_bytes())?;
    }
    Ok(())
}

fn read_sidecar<T: Scalar>(mut bytes: &[u8], dim: usize, words: usize) -> std::result::Result<SubwordTable<T>, String> {
    let mut take = |n: usize| -> std::result::Result<Vec<u8>, String> {
        let mut buf = vec![0u8; n];
        bytes.read_exact(&mut buf).map_err(|_| "truncated subword file".to_string())?;
        Ok(buf)
    };
    if take(8)? != MAGIC {
        return Err("not a subword file (bad magic bytes)".into());
    }
    let version = u32::from_le_bytes(take(4)?.try_into().unwrap());
    if version != VERSION {
        return Err(format!("unsupported subword file version {version}"));
    }
    let mut header = [0u64; 6];
    for h in &mut header {
        *h = u64::from_le_bytes(take(8)?.try_into().unwrap());
    }
    let [d, n, min_n, max_n, buckets, stored] = header;
    if d as usize != dim || n as usize != words {
        return Err(format!("subword file is for {n} words x {d} dims, vectors are {words} x {dim}"));
    }
    if min_n == 0 || min_n > max_n || buckets == 0 || buckets > u64::from(u32::MAX) {
        return Err("invalid n-gram settings".into());
    }
    let stored = stored as usize;
    let ids: Vec<u32> = take(stored * 4)?
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if ids.windows(2).any(|p| p[0] >= p[1]) || ids.last().is_some_and(|&b| u64::from(b) >= buckets) {
        return Err("bucket ids not ascending or out of range".into());
    }
    let floats: Vec<T> = take((words + stored) * dim * 8)?
        .chunks_exact(8)
        .map(|c| T::lit(f64::from_le_bytes(c.try_into().unwrap())))
        .collect();
    if floats.iter().any(|x| !x.is_finite()) {
        return Err("non-finite subword vector".into());
    }
    let mut word_inputs = floats;
    let bucket_rows = word_inputs.split_off(words * dim);
    Ok(SubwordTable::new(
        min_n as usize,
        max_n as usize,
        buckets as u32,
        word_inputs,
        ids,
        bucket_rows,
    ))
}
