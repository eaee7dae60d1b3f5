use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{layout, Model, ModelConfig, Parameters, TensorSpec};
use crate::error::{Error, Result};
use crate::io::atomic_write;
use crate::num::Scalar;

const MAGIC: &[u8; 8] = b"FSMODEL\0";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    config: ModelConfig,
    vocab: Vec<String>,
    tensors: Vec<TensorSpec>,
}

/// Magic bytes, version, JSON header length and header, then every tensor
/// as little-endian f32 in header order. Adam state is not saved.
pub fn save_model<T: Scalar>(model: &Model<T>, path: &Path) -> Result<()> {
    let header = serde_json::to_vec(&Header {
        config: model.config().clone(),
        vocab: model.vocab().to_vec(),
        tensors: model.params.specs().to_vec(),
    })?;
    atomic_write(path, |w| {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        for x in &model.params.values {
            w.write_all(&x.to_f32().unwrap_or(f32::NAN).to_le_bytes())?;
        }
        Ok(())
    })
}

pub fn load_model<T: Scalar>(path: &Path) -> Result<Model<T>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |m: &str| Error::format(path, 0, m.to_owned());
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(bad("not a model checkpoint (bad magic bytes)"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(bad(&format!("unsupported checkpoint version {version}")));
    }
    let hlen = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let body = bytes.get(20..).ok_or_else(|| bad("truncated checkpoint"))?;
    if body.len() < hlen {
        return Err(bad("truncated checkpoint header"));
    }
    let header: Header = serde_json::from_slice(&body[..hlen]).map_err(|e| bad(&format!("header: {e}")))?;
    header.config.validate()?;
    let expect = layout(&header.config, header.vocab.len() + 2);
    if header.tensors != expect {
        return Err(bad("tensor list does not match the model configuration"));
    }
    let data = &body[hlen..];
    let n: usize = expect.iter().map(TensorSpec::len).sum();
    if data.len() != n * 4 {
        return Err(bad(&format!("expected {} bytes of tensor data, found {}", n * 4, data.len())));
    }
    let values: Vec<T> = data
        .chunks_exact(4)
        .map(|c| T::lit(f64::from(f32::from_le_bytes(c.try_into().unwrap()))))
        .collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(bad("non-finite tensor value"));
    }
    let frozen = !header.config.fine_tune_embeddings;
    let params = Parameters::from_values(expect, values, frozen);
    Ok(Model::from_parts(header.config, header.vocab, params))
}
