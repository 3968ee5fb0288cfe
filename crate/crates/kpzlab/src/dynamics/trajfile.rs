//! Binary snapshot files.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic    [u8; 8]  = b"KPZTRAJ1"
//! N        u64
//! T        f64
//! seed     u64
//! frames   u64
//! frame*   { time f64, spins [u8; ceil(N/8)], flux i64 }
//! ```
//!
//! Spin bytes pack site i into bit i % 8 of byte i / 8, bit set meaning +1.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::record::TrajectoryRecord;
use crate::ensembles::SpinConfig;
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"KPZTRAJ1";

#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub time: f64,
    pub config: SpinConfig,
    pub flux: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryFile {
    pub n: usize,
    pub horizon: f64,
    pub seed: u64,
    pub frames: Vec<Frame>,
}

impl TrajectoryFile {
    pub fn from_record(record: &TrajectoryRecord) -> Self {
        let mut frames = vec![Frame { time: 0.0, config: record.initial.clone(), flux: 0 }];
        frames.extend(record.snapshots.iter().map(|s| Frame { time: s.time, config: s.config.clone(), flux: s.flux }));
        TrajectoryFile { n: record.ring_size, horizon: record.horizon, seed: record.seed, frames }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_u64::<LittleEndian>(self.n as u64)?;
        w.write_f64::<LittleEndian>(self.horizon)?;
        w.write_u64::<LittleEndian>(self.seed)?;
        w.write_u64::<LittleEndian>(self.frames.len() as u64)?;
        for f in &self.frames {
            w.write_f64::<LittleEndian>(f.time)?;
            w.write_all(&f.config.packed_bytes())?;
            w.write_i64::<LittleEndian>(f.flux)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Validation("not a trajectory file".into()));
        }
        let n = r.read_u64::<LittleEndian>()? as usize;
        let horizon = r.read_f64::<LittleEndian>()?;
        let seed = r.read_u64::<LittleEndian>()?;
        let count = r.read_u64::<LittleEndian>()? as usize;
        let mut frames = Vec::with_capacity(count.min(1 << 20));
        let mut buf = vec![0u8; n.div_ceil(8)];
        for _ in 0..count {
            let time = r.read_f64::<LittleEndian>()?;
            r.read_exact(&mut buf)?;
            let config = SpinConfig::from_packed_bytes(n, &buf)?;
            let flux = r.read_i64::<LittleEndian>()?;
            frames.push(Frame { time, config, flux });
        }
        Ok(TrajectoryFile { n, horizon, seed, frames })
    }
}
