//! Binary checkpoints of a running power iteration.
//!
//! Layout (little endian): magic `CAPLABCK`, format version `u32`, SHA-256 of the
//! operator descriptor, iteration `u64`, precision in bits `u32` (53 marks the `f64`
//! warm-up phase), shift `f64`, vector length `u64`, limbs per entry `u32`, then per
//! entry a binary exponent `i64` and that many radix-2^64 limbs of the significand
//! (least significant first), and finally a SHA-256 of everything before it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rug::integer::Order;
use rug::{Float, Integer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CAPLABCK";
const VERSION: u32 = 1;
const ZERO_EXP: i64 = i64::MIN;
pub(crate) const F64_PHASE_BITS: u32 = 53;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Checkpoint {
    pub descriptor_hash: [u8; 32],
    pub iteration: u64,
    pub bits: u32,
    pub shift: f64,
    pub vector: Vec<Float>,
}

pub(crate) fn descriptor_hash(descriptor: &str) -> [u8; 32] {
    Sha256::digest(descriptor.as_bytes()).into()
}

fn limbs_for(bits: u32) -> usize {
    (bits as usize).div_ceil(64)
}

impl Checkpoint {
    fn encode(&self) -> Vec<u8> {
        let limbs = limbs_for(self.bits);
        let mut out = Vec::with_capacity(96 + self.vector.len() * (8 + 8 * limbs));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.descriptor_hash);
        out.extend_from_slice(&self.iteration.to_le_bytes());
        out.extend_from_slice(&self.bits.to_le_bytes());
        out.extend_from_slice(&self.shift.to_le_bytes());
        out.extend_from_slice(&(self.vector.len() as u64).to_le_bytes());
        out.extend_from_slice(&(limbs as u32).to_le_bytes());
        for x in &self.vector {
            let (exp, digits) = match x.to_integer_exp() {
                Some((m, e)) if m != 0 => (i64::from(e), m.to_digits::<u64>(Order::Lsf)),
                _ => (ZERO_EXP, Vec::new()),
            };
            out.extend_from_slice(&exp.to_le_bytes());
            for i in 0..limbs {
                out.extend_from_slice(&digits.get(i).copied().unwrap_or(0).to_le_bytes());
            }
        }
        let sum = Sha256::digest(&out);
        out.extend_from_slice(&sum);
        out
    }

    fn decode(bytes: &[u8], path: &Path) -> Result<Self> {
        let corrupt = |reason: &str| Error::CheckpointCorrupt { path: path.to_path_buf(), reason: reason.into() };
        if bytes.len() < 8 + 4 + 32 + 8 + 4 + 8 + 8 + 4 + 32 {
            return Err(corrupt("file too short"));
        }
        let (body, sum) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != sum {
            return Err(corrupt("checksum mismatch (truncated or modified)"));
        }
        let mut r = Reader { buf: body, pos: 0 };
        if r.take(8) != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let version = u32::from_le_bytes(r.take(4).try_into().unwrap());
        if version != VERSION {
            return Err(corrupt(&format!("unsupported format version {version}")));
        }
        let descriptor_hash: [u8; 32] = r.take(32).try_into().unwrap();
        let iteration = r.u64();
        let bits = u32::from_le_bytes(r.take(4).try_into().unwrap());
        let shift = f64::from_le_bytes(r.take(8).try_into().unwrap());
        let len = r.u64() as usize;
        let limbs = u32::from_le_bytes(r.take(4).try_into().unwrap()) as usize;
        if limbs != limbs_for(bits) || body.len() - r.pos != len * (8 + 8 * limbs) {
            return Err(corrupt("length fields disagree with file size"));
        }
        let mut vector = Vec::with_capacity(len);
        let mut digits = vec![0u64; limbs];
        for _ in 0..len {
            let exp = r.u64() as i64;
            for d in digits.iter_mut() {
                *d = r.u64();
            }
            let x = if exp == ZERO_EXP {
                Float::new(bits)
            } else {
                let e = i32::try_from(exp).map_err(|_| corrupt("exponent out of range"))?;
                Float::with_val(bits, Integer::from_digits(&digits, Order::Lsf)) << e
            };
            vector.push(x);
        }
        Ok(Self { descriptor_hash, iteration, bits, shift, vector })
    }

    /// Writes to a sibling temporary file and renames it over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = temp_path(path);
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.encode())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::decode(&fs::read(path)?, path)
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> &[u8] {
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        s
    }

    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take(8).try_into().unwrap())
    }
}
