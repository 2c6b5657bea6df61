//! Checkpoint files: versioned header, JSON architecture descriptor and
//! training counters, then flat little-endian f32 parameter arrays for the
//! five networks (policy, q1, q2, q1_target, q2_target) in that order.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::update::SacNets;

const MAGIC: &[u8; 4] = b"OGCP";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a checkpoint file (bad magic)")]
    BadMagic,
    #[error("checkpoint version {found} is newer than supported {supported}")]
    VersionTooNew { found: u32, supported: u32 },
    #[error("architecture mismatch: {0}")]
    ArchMismatch(String),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error("header parse error: {0}")]
    Header(#[from] serde_json::Error),
}

/// Header payload stored as JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub obs_dim: usize,
    pub act_dim: usize,
    pub hidden: Vec<usize>,
    pub log_alpha: f64,
    pub episodes: u64,
    pub env_steps: u64,
    pub updates: u64,
    /// Opaque trainer state (curriculum and domain-randomization engines).
    #[serde(default)]
    pub extra: serde_json::Value,
}

fn write_net(w: &mut impl Write, params: &[f32]) -> std::io::Result<()> {
    w.write_all(&(params.len() as u64).to_le_bytes())?;
    for p in params {
        w.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

fn read_net(r: &mut impl Read) -> Result<Vec<f32>, CheckpointError> {
    let mut len8 = [0u8; 8];
    r.read_exact(&mut len8)?;
    let n = u64::from_le_bytes(len8) as usize;
    if n > 512 * 1024 * 1024 {
        return Err(CheckpointError::Corrupt(format!("implausible net size {n}")));
    }
    let mut buf = vec![0u8; n * 4];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

pub fn save_checkpoint(
    path: &Path,
    nets: &SacNets,
    meta: &CheckpointMeta,
) -> Result<(), CheckpointError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(MAGIC)?;
    f.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    let header = serde_json::to_vec(meta)?;
    f.write_all(&(header.len() as u32).to_le_bytes())?;
    f.write_all(&header)?;
    write_net(&mut f, &nets.policy.net.flat_params())?;
    write_net(&mut f, &nets.q1.flat_params())?;
    write_net(&mut f, &nets.q2.flat_params())?;
    write_net(&mut f, &nets.q1_target.flat_params())?;
    write_net(&mut f, &nets.q2_target.flat_params())?;
    f.flush()?;
    Ok(())
}

/// Rebuild networks from a checkpoint. The architecture comes from the
/// descriptor; parameter array lengths must match it exactly.
pub fn load_checkpoint(path: &Path) -> Result<(SacNets, CheckpointMeta), CheckpointError> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let mut v4 = [0u8; 4];
    f.read_exact(&mut v4)?;
    let version = u32::from_le_bytes(v4);
    if version > CHECKPOINT_VERSION {
        return Err(CheckpointError::VersionTooNew {
            found: version,
            supported: CHECKPOINT_VERSION,
        });
    }
    f.read_exact(&mut v4)?;
    let hlen = u32::from_le_bytes(v4) as usize;
    let mut hbuf = vec![0u8; hlen];
    f.read_exact(&mut hbuf)?;
    let meta: CheckpointMeta = serde_json::from_slice(&hbuf)?;

    let mut nets = SacNets::new(meta.obs_dim, meta.act_dim, &meta.hidden, 0);
    nets.log_alpha = meta.log_alpha;
    let targets: [&mut crate::nn::Mlp<f32>; 5] = [
        &mut nets.policy.net,
        &mut nets.q1,
        &mut nets.q2,
        &mut nets.q1_target,
        &mut nets.q2_target,
    ];
    for (i, net) in targets.into_iter().enumerate() {
        let params = read_net(&mut f)?;
        net.load_flat_params(&params)
            .map_err(|e| CheckpointError::ArchMismatch(format!("net {i}: {e}")))?;
    }
    nets.reset_optimizers();
    Ok((nets, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sac::replay::policy_input;

    fn meta_for(nets: &SacNets, hidden: Vec<usize>) -> CheckpointMeta {
        CheckpointMeta {
            obs_dim: nets.obs_dim,
            act_dim: nets.act_dim,
            hidden,
            log_alpha: nets.log_alpha,
            episodes: 12,
            env_steps: 480,
            updates: 480,
            extra: serde_json::json!({"note": "test"}),
        }
    }

    #[test]
    fn roundtrip_preserves_policy_behavior_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.bin");
        let mut nets = SacNets::new(12, 3, &[16, 16], 3);
        nets.log_alpha = -0.7;
        save_checkpoint(&path, &nets, &meta_for(&nets, vec![16, 16])).unwrap();
        let (mut loaded, meta) = load_checkpoint(&path).unwrap();
        assert_eq!(meta.episodes, 12);
        assert_eq!(loaded.log_alpha, -0.7);

        let mut rng = crate::rng::stream_rng(1, crate::rng::Stream::Eval, 0);
        use rand::Rng;
        for _ in 0..100 {
            let goal = [rng.gen_range(-1.0f32..1.0), rng.gen(), rng.gen()];
            let core = core::array::from_fn(|_| rng.gen_range(-1.0f32..1.0));
            let input = policy_input(&goal, &core);
            let a = nets.act(&input, true, &mut rng);
            let b = loaded.act(&input, true, &mut rng);
            assert_eq!(a, b, "deterministic actions must survive the roundtrip");
        }
    }

    #[test]
    fn newer_version_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.bin");
        let nets = SacNets::new(12, 3, &[8], 0);
        save_checkpoint(&path, &nets, &meta_for(&nets, vec![8])).unwrap();
        // bump the stored version
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4..8].copy_from_slice(&99u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        match load_checkpoint(&path) {
            Err(CheckpointError::VersionTooNew { found: 99, .. }) => {}
            Err(other) => panic!("expected version rejection, got {other:?}"),
            Ok(_) => panic!("expected version rejection, got success"),
        }
    }

    #[test]
    fn truncated_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.bin");
        let nets = SacNets::new(12, 3, &[8], 0);
        save_checkpoint(&path, &nets, &meta_for(&nets, vec![8])).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 64]).unwrap();
        assert!(load_checkpoint(&path).is_err());
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.bin");
        std::fs::write(&path, b"NOPEnope").unwrap();
        assert!(matches!(load_checkpoint(&path), Err(CheckpointError::BadMagic)));
    }
}
