//! Binary dataset files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes  "EVDS0001"
//! N        u64      variable count
//! K        u64      relevant-variable count of the generating spec
//! m        u64      example count
//! seed     u64
//! spec     u64      spec fingerprint
//! labels   ceil(m/8) bytes, bit e of the stream is label e (LSB first)
//! rows     m rows of ceil(N/8) bytes, bit v of a row is variable v
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::dataset::{words_for, Dataset};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"EVDS0001";

fn pack_bits(bits: impl Iterator<Item = bool>, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n.div_ceil(8)];
    for (i, b) in bits.enumerate() {
        if b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

pub fn write_dataset<W: Write>(d: &Dataset, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    w.write_all(MAGIC)?;
    for x in [d.n_vars() as u64, d.n_relevant() as u64, d.m() as u64, d.seed(), d.spec_hash()] {
        w.write_all(&x.to_le_bytes())?;
    }
    w.write_all(&pack_bits(d.labels().iter().copied(), d.m()))?;
    let row_bytes = d.n_vars().div_ceil(8);
    for e in 0..d.m() {
        let bytes: Vec<u8> = d.row(e).iter().flat_map(|w| w.to_le_bytes()).take(row_bytes).collect();
        w.write_all(&bytes)?;
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_dataset<R: Read>(input: R) -> Result<Dataset> {
    let mut r = BufReader::new(input);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|e| Error::Format(format!("missing magic: {e}")))?;
    if &magic != MAGIC {
        return Err(Error::Format("not a dataset file (bad magic)".into()));
    }
    let n_vars = read_u64(&mut r)? as usize;
    let n_relevant = read_u64(&mut r)? as usize;
    let m = read_u64(&mut r)? as usize;
    let seed = read_u64(&mut r)?;
    let spec_hash = read_u64(&mut r)?;
    let mut label_bytes = vec![0u8; m.div_ceil(8)];
    r.read_exact(&mut label_bytes).map_err(|e| Error::Format(format!("truncated labels: {e}")))?;
    let labels = (0..m).map(|e| label_bytes[e / 8] >> (e % 8) & 1 == 1).collect();
    let row_bytes = n_vars.div_ceil(8);
    let wpr = words_for(n_vars);
    let mut rows = Vec::with_capacity(m * wpr);
    let mut buf = vec![0u8; wpr * 8];
    for e in 0..m {
        buf.iter_mut().for_each(|b| *b = 0);
        r.read_exact(&mut buf[..row_bytes]).map_err(|err| Error::Format(format!("truncated row {e}: {err}")))?;
        rows.extend(buf.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes"))));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after last row".into()));
    }
    Dataset::from_parts(n_vars, n_relevant, seed, spec_hash, labels, rows)
}

pub fn save_dataset(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_dataset(d, File::create(path)?)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    read_dataset(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{draw_dataset, make_spec, Dependence, Polarity};
    use num_rational::Ratio;

    #[test]
    fn round_trip_and_layout() {
        let spec = make_spec(77, 7, Ratio::new(1, 4), &Polarity::HalfHalf, Dependence::Independent).unwrap();
        let d = draw_dataset(&spec, 13, 5).unwrap();
        let mut buf = Vec::new();
        write_dataset(&d, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 5 * 8 + 2 + 13 * 10);
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 77);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 7);
        assert_eq!(u64::from_le_bytes(buf[24..32].try_into().unwrap()), 13);
        assert_eq!(u64::from_le_bytes(buf[32..40].try_into().unwrap()), 5);
        assert_eq!(u64::from_le_bytes(buf[40..48].try_into().unwrap()), spec.fingerprint());
        let back = read_dataset(&buf[..]).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rejects_damaged_files() {
        let d = Dataset::from_rows(vec![true, false, true], &[vec![true], vec![false], vec![true]]).unwrap();
        let mut buf = Vec::new();
        write_dataset(&d, &mut buf).unwrap();
        assert!(matches!(read_dataset(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(read_dataset(&extra[..]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_dataset(&bad[..]), Err(Error::Format(_))));
    }
}
