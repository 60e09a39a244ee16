//! Checkpoints: a JSON manifest describing each tensor (name, shape, dtype,
//! byte offset) alongside a little-endian raw binary blob of f64 parameter
//! values. Round-trips are bit-exact.

use crate::error::{Result, SfmgError};
use crate::flowmatch::net::{NetMeta, VectorFieldNet};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Serialize, Deserialize)]
struct ManifestTensor {
    name: String,
    shape: Vec<usize>,
    dtype: String,
    /// Byte offset into the blob.
    offset: usize,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    meta: NetMeta,
    tensors: Vec<ManifestTensor>,
}

fn manifest_path(base: &Path) -> PathBuf {
    base.with_extension("json")
}

fn blob_path(base: &Path) -> PathBuf {
    base.with_extension("bin")
}

/// Write `<base>.json` and `<base>.bin`.
pub fn save_checkpoint<P: AsRef<Path>>(base: P, net: &VectorFieldNet) -> Result<()> {
    let base = base.as_ref();
    let manifest = Manifest {
        meta: *net.meta(),
        tensors: net
            .layout()
            .iter()
            .map(|spec| ManifestTensor {
                name: spec.name.clone(),
                shape: spec.shape.clone(),
                dtype: "f64".into(),
                offset: spec.offset * 8,
            })
            .collect(),
    };
    let json = serde_json::to_vec_pretty(&manifest)?;
    std::fs::write(manifest_path(base), json)?;

    let mut blob = std::fs::File::create(blob_path(base))?;
    let mut buf = Vec::with_capacity(net.params().len() * 8);
    for p in net.params() {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    blob.write_all(&buf)?;
    Ok(())
}

/// Read a checkpoint written by `save_checkpoint`.
pub fn load_checkpoint<P: AsRef<Path>>(base: P) -> Result<VectorFieldNet> {
    let base = base.as_ref();
    let json = std::fs::read(manifest_path(base))?;
    let manifest: Manifest = serde_json::from_slice(&json)?;
    let blob = std::fs::read(blob_path(base))?;
    if blob.len() % 8 != 0 {
        return Err(SfmgError::Invalid(format!(
            "checkpoint blob {} has a truncated value",
            blob_path(base).display()
        )));
    }
    let mut params = vec![0.0f64; blob.len() / 8];
    for (i, chunk) in blob.chunks_exact(8).enumerate() {
        params[i] = f64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
    }
    let net = VectorFieldNet::from_parts(manifest.meta, params)?;
    // verify the manifest matches the layout this build derives
    for (spec, tensor) in net.layout().iter().zip(&manifest.tensors) {
        if spec.name != tensor.name || spec.shape != tensor.shape || spec.offset * 8 != tensor.offset
        {
            return Err(SfmgError::Invalid(format!(
                "checkpoint tensor {} does not match the expected layout",
                tensor.name
            )));
        }
        if tensor.dtype != "f64" {
            return Err(SfmgError::Invalid(format!(
                "unsupported dtype {} for tensor {}",
                tensor.dtype, tensor.name
            )));
        }
    }
    if manifest.tensors.len() != net.layout().len() {
        return Err(SfmgError::Invalid("checkpoint tensor count mismatch".into()));
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngState;

    #[test]
    fn round_trip_is_bit_exact() {
        let meta = NetMeta {
            input_dim: 5,
            hidden_dim: 12,
            output_dim: 5,
            num_blocks: 2,
            conditioning_dim: 3,
        };
        let mut rng = RngState::new(77);
        let mut net = VectorFieldNet::new(meta, &mut rng);
        for p in net.params_mut() {
            *p += rng.normal();
        }
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("ckpt");
        save_checkpoint(&base, &net).unwrap();
        let loaded = load_checkpoint(&base).unwrap();
        assert_eq!(net.meta(), loaded.meta());
        assert_eq!(net.params(), loaded.params());
        // saving again produces byte-identical files
        let base2 = dir.path().join("ckpt2");
        save_checkpoint(&base2, &loaded).unwrap();
        let a = std::fs::read(base.with_extension("bin")).unwrap();
        let b = std::fs::read(base2.with_extension("bin")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_checkpoint_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_checkpoint(dir.path().join("nope")).is_err());
    }
}
