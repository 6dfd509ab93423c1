//! Policy parameter snapshots: a small versioned binary with the
//! network architecture followed by the flat parameter vector, all
//! little-endian.

use std::io::{Read, Write};
use std::path::Path;

use echelon_core::policy::PolicyNet;

use crate::error::CliError;

const MAGIC: &[u8; 4] = b"EPOL";
const VERSION: u32 = 1;

pub fn write_policy(path: &Path, net: &PolicyNet) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(MAGIC)?;
    f.write_all(&VERSION.to_le_bytes())?;
    f.write_all(&(net.input_dim as u32).to_le_bytes())?;
    f.write_all(&(net.hidden.len() as u32).to_le_bytes())?;
    for &width in &net.hidden {
        f.write_all(&(width as u32).to_le_bytes())?;
    }
    f.write_all(&(net.output_dim as u32).to_le_bytes())?;
    f.write_all(&(net.params.len() as u64).to_le_bytes())?;
    for &p in &net.params {
        f.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_policy(path: &Path) -> Result<PolicyNet, CliError> {
    let mut f = std::fs::File::open(path)?;
    let bad = |msg: &str| CliError::Runtime(format!("{}: {msg}", path.display()));
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a policy snapshot"));
    }
    let mut u32_buf = [0u8; 4];
    let mut read_u32 = |f: &mut std::fs::File| -> Result<u32, CliError> {
        f.read_exact(&mut u32_buf)?;
        Ok(u32::from_le_bytes(u32_buf))
    };
    let version = read_u32(&mut f)?;
    if version != VERSION {
        return Err(bad("unsupported snapshot version"));
    }
    let input_dim = read_u32(&mut f)? as usize;
    let n_hidden = read_u32(&mut f)? as usize;
    let mut hidden = Vec::with_capacity(n_hidden);
    for _ in 0..n_hidden {
        hidden.push(read_u32(&mut f)? as usize);
    }
    let output_dim = read_u32(&mut f)? as usize;
    let mut u64_buf = [0u8; 8];
    f.read_exact(&mut u64_buf)?;
    let count = u64::from_le_bytes(u64_buf) as usize;
    if count != PolicyNet::param_count(input_dim, &hidden, output_dim) {
        return Err(bad("parameter count does not match the architecture"));
    }
    let mut params = Vec::with_capacity(count);
    let mut f64_buf = [0u8; 8];
    for _ in 0..count {
        f.read_exact(&mut f64_buf)?;
        params.push(f64::from_le_bytes(f64_buf));
    }
    Ok(PolicyNet::zeroed(input_dim, hidden, output_dim).with_params(params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.bin");
        let mut net = PolicyNet::zeroed(5, vec![4, 3], 2);
        for (i, p) in net.params.iter_mut().enumerate() {
            *p = i as f64 * 0.25 - 3.0;
        }
        write_policy(&path, &net).unwrap();
        let loaded = read_policy(&path).unwrap();
        assert_eq!(loaded, net);
    }
}
