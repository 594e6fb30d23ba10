//! Fitted estimator models as a little-endian blob.
//!
//! ```text
//! magic "KNFE" | version u32 (= 1) | kind u8 (0 marginal, 1 conditional) | body
//! marginal body:    modes u64, dim u64, logits, means, log_sigmas, shift, scale
//! conditional body: marginal body, condition_dim u64, hidden u64,
//!                   log_sigma_lo f64, log_sigma_hi f64,
//!                   condition shift, condition scale, W1, b1, W2, b2
//! ```
//!
//! Arrays are f64 with lengths implied by the preceding counts.

use std::fs;
use std::path::Path;

use cosmic_core::knife::{ConditionalKnife, MarginalKnife, Standardizer};

use super::{IoError, Result};

const MAGIC: [u8; 4] = *b"KNFE";
const VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub enum StoredModel {
    Marginal(MarginalKnife),
    Conditional(Box<ConditionalKnife>),
}

struct Writer(Vec<u8>);

impl Writer {
    fn u64(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u64).to_le_bytes());
    }

    fn f64s(&mut self, v: &[f64]) {
        for x in v {
            self.0.extend_from_slice(&x.to_le_bytes());
        }
    }

    fn marginal(&mut self, m: &MarginalKnife) {
        self.u64(m.modes());
        self.u64(m.dim());
        self.f64s(m.logits());
        self.f64s(m.means());
        self.f64s(m.log_sigmas());
        self.f64s(m.standardizer().shift());
        self.f64s(m.standardizer().scale());
    }
}

struct Reader<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(IoError::TruncatedPayload {
            path: self.path.to_path_buf(),
            expected: (self.pos + n) as u64,
            found: self.bytes.len() as u64,
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u64(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes"));
        usize::try_from(v).map_err(|_| IoError::parse(self.path, 0, "count overflows"))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| IoError::parse(self.path, 0, "count overflows"))?)?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }

    fn marginal(&mut self) -> Result<MarginalKnife> {
        let (k, d) = (self.u64()?, self.u64()?);
        let kd = k.checked_mul(d).ok_or_else(|| IoError::parse(self.path, 0, "count overflows"))?;
        let logits = self.f64s(k)?;
        let means = self.f64s(kd)?;
        let log_sigmas = self.f64s(kd)?;
        let standardizer = Standardizer::from_parts(self.f64s(d)?, self.f64s(d)?);
        MarginalKnife::from_parts(logits, means, log_sigmas, standardizer).map_err(|e| IoError::data(self.path, e))
    }
}

pub fn write_model(model: &StoredModel, path: &Path) -> Result<()> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(&MAGIC);
    w.0.extend_from_slice(&VERSION.to_le_bytes());
    match model {
        StoredModel::Marginal(m) => {
            w.0.push(0);
            w.marginal(m);
        }
        StoredModel::Conditional(c) => {
            w.0.push(1);
            w.marginal(c.base());
            w.u64(c.condition_dim());
            w.u64(c.hidden_width());
            let (lo, hi) = c.log_sigma_bounds();
            w.f64s(&[lo, hi]);
            w.f64s(c.condition_standardizer().shift());
            w.f64s(c.condition_standardizer().scale());
            let (w1, b1, w2, b2) = c.weights();
            for part in [w1, b1, w2, b2] {
                w.f64s(part);
            }
        }
    }
    super::cemb::write_file(path, &w.0)
}

pub fn read_model(path: &Path) -> Result<StoredModel> {
    let bytes = fs::read(path).map_err(|e| IoError::io(path, e))?;
    if bytes.len() < 9 || bytes[..4] != MAGIC {
        return Err(IoError::BadMagic { path: path.to_path_buf() });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(IoError::VersionUnsupported { path: path.to_path_buf(), version });
    }
    let kind = bytes[8];
    let mut r = Reader { path, bytes: &bytes, pos: 9 };
    let model = match kind {
        0 => StoredModel::Marginal(r.marginal()?),
        1 => {
            let base = r.marginal()?;
            let (ds, hidden) = (r.u64()?, r.u64()?);
            let bounds = (r.f64()?, r.f64()?);
            let cond_std = Standardizer::from_parts(r.f64s(ds)?, r.f64s(ds)?);
            let n_out = base.modes() * (1 + 2 * base.dim());
            let w1 = r.f64s(hidden * ds)?;
            let b1 = r.f64s(hidden)?;
            let w2 = r.f64s(n_out * hidden)?;
            let b2 = r.f64s(n_out)?;
            StoredModel::Conditional(Box::new(
                ConditionalKnife::from_parts(base, cond_std, hidden, w1, b1, w2, b2, bounds)
                    .map_err(|e| IoError::data(path, e))?,
            ))
        }
        other => return Err(IoError::parse(path, 0, format!("unknown model kind {other}"))),
    };
    if r.pos != bytes.len() {
        return Err(IoError::TrailingBytes {
            path: path.to_path_buf(),
            expected: r.pos as u64,
            found: (bytes.len() - r.pos) as u64,
        });
    }
    Ok(model)
}
