//! Binary network snapshot: a versioned header (magic, version, layer
//! shapes, activation tag) followed by the f32 parameters little-endian in
//! declaration order. Roundtrips are bit-exact.

use std::io::{self, Read, Write};

use thiserror::Error;

use super::mlp::{Activation, Linear, Mlp};

pub const MLP_MAGIC: &[u8; 8] = b"SEACMLP\0";
pub const MLP_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unsupported version {0}")]
    BadVersion(u32),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
}

pub fn write_mlp(w: &mut impl Write, net: &Mlp<f32>) -> Result<(), CheckpointError> {
    w.write_all(MLP_MAGIC)?;
    write_u32(w, MLP_VERSION)?;
    w.write_all(&[net.hidden_activation.tag()])?;
    write_u32(w, net.layers.len() as u32)?;
    for l in &net.layers {
        write_u32(w, l.in_dim as u32)?;
        write_u32(w, l.out_dim as u32)?;
    }
    for l in &net.layers {
        write_f32s(w, &l.weight)?;
        write_f32s(w, &l.bias)?;
    }
    Ok(())
}

pub fn read_mlp(r: &mut impl Read) -> Result<Mlp<f32>, CheckpointError> {
    expect_magic(r, MLP_MAGIC, "SEACMLP")?;
    let version = read_u32(r)?;
    if version != MLP_VERSION {
        return Err(CheckpointError::BadVersion(version));
    }
    let tag = read_u8(r)?;
    let hidden_activation = Activation::from_tag(tag)
        .ok_or_else(|| CheckpointError::Corrupt(format!("unknown activation tag {tag}")))?;
    let n_layers = read_u32(r)? as usize;
    if n_layers == 0 || n_layers > 64 {
        return Err(CheckpointError::Corrupt(format!("implausible layer count {n_layers}")));
    }
    let mut shapes = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let in_dim = read_u32(r)? as usize;
        let out_dim = read_u32(r)? as usize;
        if in_dim == 0 || out_dim == 0 || in_dim > 1 << 20 || out_dim > 1 << 20 {
            return Err(CheckpointError::Corrupt(format!("bad layer shape {in_dim}x{out_dim}")));
        }
        shapes.push((in_dim, out_dim));
    }
    for w in shapes.windows(2) {
        if w[0].1 != w[1].0 {
            return Err(CheckpointError::Corrupt("layer shapes do not chain".into()));
        }
    }
    let mut layers = Vec::with_capacity(n_layers);
    for (in_dim, out_dim) in shapes {
        let weight = read_f32s(r, in_dim * out_dim)?;
        let bias = read_f32s(r, out_dim)?;
        layers.push(Linear { weight, bias, in_dim, out_dim });
    }
    Ok(Mlp { layers, hidden_activation })
}

// Little-endian primitives shared by the run-level checkpoint container.

pub fn write_u8(w: &mut impl Write, v: u8) -> io::Result<()> {
    w.write_all(&[v])
}

pub fn read_u8(r: &mut impl Read) -> io::Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

pub fn write_u32(w: &mut impl Write, v: u32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn write_u64(w: &mut impl Write, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn write_u128(w: &mut impl Write, v: u128) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub fn read_u128(r: &mut impl Read) -> io::Result<u128> {
    let mut b = [0u8; 16];
    r.read_exact(&mut b)?;
    Ok(u128::from_le_bytes(b))
}

pub fn write_f32(w: &mut impl Write, v: f32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub fn read_f32(r: &mut impl Read) -> io::Result<f32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(f32::from_le_bytes(b))
}

pub fn write_f64(w: &mut impl Write, v: f64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub fn read_f64(r: &mut impl Read) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn write_f32s(w: &mut impl Write, vals: &[f32]) -> io::Result<()> {
    for v in vals {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_f32s(r: &mut impl Read, n: usize) -> io::Result<Vec<f32>> {
    let mut bytes = vec![0u8; n * 4];
    r.read_exact(&mut bytes)?;
    Ok(bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect())
}

pub fn expect_magic(
    r: &mut impl Read,
    magic: &'static [u8; 8],
    name: &'static str,
) -> Result<(), CheckpointError> {
    let mut got = [0u8; 8];
    r.read_exact(&mut got)?;
    if &got != magic {
        return Err(CheckpointError::BadMagic { expected: name });
    }
    Ok(())
}
