//! Checkpoint container: JSON header (config, tensor table, format version)
//! followed by raw little-endian f32 payload in header order. Save/load is
//! a byte-identical round trip.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::SchConfig;
use crate::error::{NetworkError, Result};
use crate::model::SchnModel;

const MAGIC: &[u8; 8] = b"SCHNCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorRecord {
    pub name: String,
    pub shape: Vec<usize>,
    /// Offset into the payload, in floats.
    pub offset: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub config: SchConfig,
    pub tensors: Vec<TensorRecord>,
    /// Opaque training-state extension (optimizer counters, epoch, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_state: Option<serde_json::Value>,
}

/// Write a checkpoint file from ordered named tensors.
pub fn write_checkpoint(
    path: &Path,
    config: SchConfig,
    tensors: &[(String, Vec<usize>, &[f32])],
    train_state: Option<serde_json::Value>,
) -> Result<()> {
    let mut records = Vec::with_capacity(tensors.len());
    let mut offset = 0u64;
    for (name, shape, data) in tensors {
        let numel: usize = shape.iter().product();
        if numel != data.len() {
            return Err(NetworkError::Checkpoint(format!(
                "tensor {name}: shape {shape:?} does not match {} values",
                data.len()
            )));
        }
        records.push(TensorRecord {
            name: name.clone(),
            shape: shape.clone(),
            offset,
        });
        offset += numel as u64;
    }
    let header = CheckpointHeader {
        format_version: CHECKPOINT_VERSION,
        config,
        tensors: records,
        train_state,
    };
    let header_bytes = serde_json::to_vec(&header)?;

    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(MAGIC)?;
    file.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    file.write_all(&(header_bytes.len() as u64).to_le_bytes())?;
    file.write_all(&header_bytes)?;
    for (_, _, data) in tensors {
        for v in *data {
            file.write_all(&v.to_le_bytes())?;
        }
    }
    file.flush()?;
    Ok(())
}

/// Read a checkpoint: header plus one payload buffer per tensor record, in
/// header order. Rejects bad magic, version mismatches, and truncation.
pub fn read_checkpoint(path: &Path) -> Result<(CheckpointHeader, Vec<Vec<f32>>)> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    file.read_exact(&mut magic)
        .map_err(|_| NetworkError::Checkpoint("file too short for magic".into()))?;
    if &magic != MAGIC {
        return Err(NetworkError::Checkpoint("not a checkpoint file".into()));
    }
    let mut word = [0u8; 4];
    file.read_exact(&mut word)
        .map_err(|_| NetworkError::Checkpoint("truncated container version".into()))?;
    let container_version = u32::from_le_bytes(word);
    if container_version != CHECKPOINT_VERSION {
        return Err(NetworkError::Checkpoint(format!(
            "container version {container_version} unsupported (want {CHECKPOINT_VERSION})"
        )));
    }
    let mut len_bytes = [0u8; 8];
    file.read_exact(&mut len_bytes)
        .map_err(|_| NetworkError::Checkpoint("truncated header length".into()))?;
    let header_len = u64::from_le_bytes(len_bytes) as usize;
    let mut header_bytes = vec![0u8; header_len];
    file.read_exact(&mut header_bytes)
        .map_err(|_| NetworkError::Checkpoint("truncated header".into()))?;
    let header: CheckpointHeader = serde_json::from_slice(&header_bytes)
        .map_err(|e| NetworkError::Checkpoint(format!("corrupt header: {e}")))?;
    if header.format_version != CHECKPOINT_VERSION {
        return Err(NetworkError::Checkpoint(format!(
            "format version {} unsupported",
            header.format_version
        )));
    }

    let mut payload = Vec::new();
    file.read_to_end(&mut payload)?;
    let mut buffers = Vec::with_capacity(header.tensors.len());
    for record in &header.tensors {
        let numel: usize = record.shape.iter().product();
        let start = record.offset as usize * 4;
        let end = start + numel * 4;
        if end > payload.len() {
            return Err(NetworkError::Checkpoint(format!(
                "tensor {} extends past end of file",
                record.name
            )));
        }
        let buf: Vec<f32> = payload[start..end]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        buffers.push(buf);
    }
    Ok((header, buffers))
}

/// Save just the model parameters.
pub fn save_model(model: &SchnModel<f32>, path: &Path) -> Result<()> {
    let params = model.named_params();
    let tensors: Vec<(String, Vec<usize>, &[f32])> = params
        .iter()
        .map(|(name, t)| (name.clone(), t.shape().to_vec(), t.data()))
        .collect();
    write_checkpoint(path, model.config, &tensors, None)
}

/// Restore a model from a checkpoint written by [`save_model`] (or from a
/// training checkpoint; extra `adam.*` records are ignored here).
pub fn load_model(path: &Path) -> Result<SchnModel<f32>> {
    let (header, buffers) = read_checkpoint(path)?;
    let mut by_name: HashMap<&str, (&TensorRecord, Vec<f32>)> = HashMap::new();
    for (record, buf) in header.tensors.iter().zip(buffers) {
        by_name.insert(record.name.as_str(), (record, buf));
    }
    let mut model = SchnModel::init_zeros(header.config)?;
    for (name, slot) in model.named_params_mut() {
        let Some((record, buf)) = by_name.remove(name.as_str()) else {
            return Err(NetworkError::Checkpoint(format!(
                "checkpoint is missing tensor {name}"
            )));
        };
        if record.shape != slot.shape() {
            return Err(NetworkError::Checkpoint(format!(
                "tensor {name}: checkpoint shape {:?} != model shape {:?}",
                record.shape,
                slot.shape()
            )));
        }
        *slot = schn_tensor::Tensor::param(buf, &record.shape)?;
    }
    Ok(model)
}
