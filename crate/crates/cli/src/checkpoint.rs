//! Binary snapshots of a Fourier-space vector field.
//!
//! Layout, all little-endian: `b"NSRW"`, version `u32`, `d u32`, `N u32`,
//! `L f64`, `t f64`, cutoff `f64`, then for each of the `d` components the
//! coefficients in row-major frequency order as interleaved `(re, im)` f64.

use std::path::Path;

use nsrw_core::{make_grid, Space, SpectralField};
use num_complex::Complex64;

pub const MAGIC: [u8; 4] = *b"NSRW";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 3 + 8 * 3;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("not a checkpoint: magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported checkpoint version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("truncated checkpoint: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("checkpoint has {0} trailing bytes")]
    Trailing(usize),
    #[error("invalid checkpoint header: {0}")]
    Header(String),
    #[error("checkpoint field must be a {0}-component vector in Fourier space")]
    NotSavable(usize),
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub field: SpectralField,
    pub t: f64,
    pub cutoff: f64,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const K: usize>(&mut self) -> [u8; K] {
        let out: [u8; K] = self.bytes[self.pos..self.pos + K].try_into().expect("length checked");
        self.pos += K;
        out
    }
    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }
    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Result<Vec<u8>, CheckpointError> {
        let g = self.field.grid();
        let d = g.dim();
        if self.field.space() != Space::Fourier || self.field.num_components() != d {
            return Err(CheckpointError::NotSavable(d));
        }
        let mut out = Vec::with_capacity(HEADER_LEN + d * g.len() * 16);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(d as u32).to_le_bytes());
        out.extend_from_slice(&(g.n() as u32).to_le_bytes());
        out.extend_from_slice(&g.length().to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        out.extend_from_slice(&self.cutoff.to_le_bytes());
        for comp in self.field.components() {
            for v in comp {
                out.extend_from_slice(&v.re.to_le_bytes());
                out.extend_from_slice(&v.im.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        if bytes.len() < 4 {
            return Err(CheckpointError::Truncated {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take::<4>();
        if magic != MAGIC {
            return Err(CheckpointError::BadMagic(magic));
        }
        if bytes.len() < HEADER_LEN {
            return Err(CheckpointError::Truncated {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let version = r.u32();
        if version != VERSION {
            return Err(CheckpointError::Version {
                found: version,
                expected: VERSION,
            });
        }
        let d = r.u32() as usize;
        let n = r.u32() as usize;
        let length = r.f64();
        let t = r.f64();
        let cutoff = r.f64();
        let grid = make_grid(d, n, length).map_err(|e| CheckpointError::Header(e.to_string()))?;
        let expected = HEADER_LEN + d * grid.len() * 16;
        if bytes.len() < expected {
            return Err(CheckpointError::Truncated {
                expected,
                found: bytes.len(),
            });
        }
        if bytes.len() > expected {
            return Err(CheckpointError::Trailing(bytes.len() - expected));
        }
        let comps = (0..d)
            .map(|_| (0..grid.len()).map(|_| Complex64::new(r.f64(), r.f64())).collect())
            .collect();
        let field = SpectralField::from_components(&grid, comps, Space::Fourier)
            .map_err(|e| CheckpointError::Header(e.to_string()))?;
        Ok(Self { field, t, cutoff })
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

pub fn save_checkpoint(field: &SpectralField, t: f64, cutoff: f64, path: &Path) -> Result<(), CheckpointError> {
    Checkpoint {
        field: field.clone(),
        t,
        cutoff,
    }
    .save(path)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, CheckpointError> {
    Checkpoint::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsrw_core::{rough_data, DataProfile};

    fn sample() -> Checkpoint {
        let g = make_grid(2, 16, 3.0).unwrap();
        Checkpoint {
            field: rough_data(&g, 0.2, DataProfile::default(), 1, Some(1.0)).unwrap(),
            t: 0.375,
            cutoff: 7.5,
        }
    }

    #[test]
    fn bytes_round_trip_bitwise() {
        let c = sample();
        let bytes = c.to_bytes().unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 2 * 256 * 16);
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes().unwrap(), bytes);
        assert_eq!(back, c);
    }

    #[test]
    fn corrupt_inputs_are_named() {
        let bytes = sample().to_bytes().unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(Checkpoint::from_bytes(&bad), Err(CheckpointError::BadMagic(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(
            Checkpoint::from_bytes(&bad),
            Err(CheckpointError::Version { found: 9, .. })
        ));
        assert!(matches!(
            Checkpoint::from_bytes(&bytes[..bytes.len() - 1]),
            Err(CheckpointError::Truncated { .. })
        ));
        assert!(matches!(
            Checkpoint::from_bytes(&bytes[..10]),
            Err(CheckpointError::Truncated { .. })
        ));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(Checkpoint::from_bytes(&long), Err(CheckpointError::Trailing(1))));
    }

    #[test]
    fn physical_fields_are_refused() {
        let c = sample();
        let phys = Checkpoint {
            field: c.field.to_physical().unwrap(),
            ..c
        };
        assert!(matches!(phys.to_bytes(), Err(CheckpointError::NotSavable(2))));
    }
}
