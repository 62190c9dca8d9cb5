//! Binary format. All integers and floats are little-endian.
//!
//! ```text
//! magic        4 bytes   "MCSC"
//! version      u16
//! task         u8        0 = binary, 1 = real
//! dim          u16       coordinates per point
//! eta          f64
//! gamma        f64
//! erm_id_len   u32
//! erm_id       erm_id_len bytes of UTF-8
//! n            u32       number of groups
//! k            u32       number of stored points
//! points       k records of: u32 index, dim × f64 coords, f64 label
//! side_bits    u32       side information length in bits
//! side_info    ⌈side_bits/8⌉ bytes, bit i at byte i/8, position i%8; padding zero
//! crc          u32       CRC-32 (IEEE) of every preceding byte
//! ```

use super::{CompressionSet, SchemeMeta, StoredPoint};
use crate::error::{invalid, Error, Result};
use crate::types::{Point, TaskKind};

pub const MAGIC: &[u8; 4] = b"MCSC";
pub const FORMAT_VERSION: u16 = 1;

fn u32_field(value: usize, what: &str) -> Result<u32> {
    u32::try_from(value).map_err(|_| invalid(format!("{what} = {value} does not fit the format")))
}

pub fn serialize(cs: &CompressionSet) -> Result<Vec<u8>> {
    if cs.groups().iter().any(Vec::is_empty) || cs.n() == 0 {
        return Err(invalid("cannot serialize empty groups"));
    }
    let meta = cs.meta();
    let dim =
        u16::try_from(cs.dim()).map_err(|_| invalid("point dimension does not fit the format"))?;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&meta.version.to_le_bytes());
    out.push(meta.task.code());
    out.extend_from_slice(&dim.to_le_bytes());
    out.extend_from_slice(&meta.eta.to_le_bytes());
    out.extend_from_slice(&meta.gamma.to_le_bytes());
    out.extend_from_slice(&u32_field(meta.erm_id.len(), "ERM id length")?.to_le_bytes());
    out.extend_from_slice(meta.erm_id.as_bytes());
    out.extend_from_slice(&u32_field(cs.n(), "group count")?.to_le_bytes());
    out.extend_from_slice(&u32_field(cs.stored_examples(), "point count")?.to_le_bytes());
    for p in cs.points() {
        out.extend_from_slice(&u32_field(p.index, "sample index")?.to_le_bytes());
        for c in p.point.coords() {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out.extend_from_slice(&p.label.to_le_bytes());
    }
    let bits = cs.side_info();
    out.extend_from_slice(&u32_field(bits.len(), "side information length")?.to_le_bytes());
    let mut packed = vec![0u8; bits.len().div_ceil(8)];
    for (i, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
        packed[i / 8] |= 1 << (i % 8);
    }
    out.extend_from_slice(&packed);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Decode(format!("truncated while reading {what}")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn deserialize(bytes: &[u8]) -> Result<CompressionSet> {
    if bytes.len() < MAGIC.len() + 4 {
        return Err(Error::Decode("input too short".into()));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Decode("bad magic".into()));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored_crc = u32::from_le_bytes(trailer.try_into().unwrap());
    if crc32fast::hash(body) != stored_crc {
        return Err(Error::Decode("checksum mismatch".into()));
    }

    let mut r = Reader {
        bytes: body,
        pos: 4,
    };
    let version = r.u16("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Decode(format!(
            "unsupported format version {version}"
        )));
    }
    let task_code = r.u8("task kind")?;
    let task = TaskKind::from_code(task_code)
        .ok_or_else(|| Error::Decode(format!("unknown task kind {task_code}")))?;
    let dim = r.u16("dimension")? as usize;
    if dim == 0 {
        return Err(Error::Decode("zero point dimension".into()));
    }
    let eta = r.f64("eta")?;
    let gamma = r.f64("gamma")?;
    let id_len = r.u32("ERM id length")? as usize;
    let erm_id = std::str::from_utf8(r.take(id_len, "ERM id")?)
        .map_err(|_| Error::Decode("ERM id is not UTF-8".into()))?
        .to_owned();
    let n = r.u32("group count")? as usize;
    let k = r.u32("point count")? as usize;
    let record = 4 + 8 * (dim + 1);
    if k.checked_mul(record)
        .is_none_or(|need| need > body.len() - r.pos)
    {
        return Err(Error::Decode("truncated point records".into()));
    }
    let mut points = Vec::with_capacity(k);
    for _ in 0..k {
        let index = r.u32("sample index")? as usize;
        let coords = (0..dim)
            .map(|_| r.f64("coordinate"))
            .collect::<Result<Vec<_>>>()?;
        let label = r.f64("label")?;
        let point = Point::new(coords).map_err(|e| Error::Decode(format!("bad point: {e}")))?;
        points.push(StoredPoint {
            index,
            point,
            label,
        });
    }
    let side_len = r.u32("side information length")? as usize;
    let packed = r.take(side_len.div_ceil(8), "side information")?;
    if r.pos != body.len() {
        return Err(Error::Decode(format!(
            "{} trailing bytes",
            body.len() - r.pos
        )));
    }
    let side_info: Vec<bool> = (0..side_len)
        .map(|i| packed[i / 8] >> (i % 8) & 1 == 1)
        .collect();
    if !side_len.is_multiple_of(8) && packed[side_len / 8] >> (side_len % 8) != 0 {
        return Err(Error::Decode("nonzero padding bits".into()));
    }
    let meta = SchemeMeta {
        eta,
        gamma,
        task,
        erm_id,
        version,
    };
    CompressionSet::from_parts(meta, points, side_info, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::LabeledSample;

    fn example() -> CompressionSet {
        let items = (0..6)
            .map(|i| {
                (
                    Point::new(vec![i as f64 / 6.0, 0.5]).unwrap(),
                    (i % 3) as f64 / 2.0,
                )
            })
            .collect();
        let s = LabeledSample::new(items, TaskKind::Real).unwrap();
        let meta = SchemeMeta {
            eta: 0.2,
            gamma: 0.125,
            task: TaskKind::Real,
            erm_id: "lipschitz:L=1".into(),
            version: 1,
        };
        CompressionSet::from_groups(meta, &s, vec![vec![5, 1, 1], vec![0, 4], vec![3, 2, 5, 0]])
            .unwrap()
    }

    #[test]
    fn round_trip_is_canonical() {
        let cs = example();
        let bytes = serialize(&cs).unwrap();
        let back = deserialize(&bytes).unwrap();
        assert_eq!(back, cs);
        assert_eq!(serialize(&back).unwrap(), bytes);
    }

    #[test]
    fn every_single_bit_flip_is_detected() {
        let bytes = serialize(&example()).unwrap();
        for i in 0..bytes.len() * 8 {
            let mut b = bytes.clone();
            b[i / 8] ^= 1 << (i % 8);
            assert!(matches!(deserialize(&b), Err(Error::Decode(_))), "bit {i}");
        }
    }

    #[test]
    fn truncations_are_detected() {
        let bytes = serialize(&example()).unwrap();
        for len in 0..bytes.len() {
            assert!(deserialize(&bytes[..len]).is_err());
        }
    }

    #[test]
    fn header_layout() {
        let bytes = serialize(&example()).unwrap();
        assert_eq!(&bytes[..4], b"MCSC");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(bytes[6], 1);
        assert_eq!(u16::from_le_bytes([bytes[7], bytes[8]]), 2);
        assert_eq!(f64::from_le_bytes(bytes[9..17].try_into().unwrap()), 0.2);
    }
}
