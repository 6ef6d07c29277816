//! Binary checkpoint files.
//!
//! Layout (integers little-endian):
//!
//! ```text
//! "GFCK1"            5-byte magic and format version
//! params hash        32 bytes, SHA-256 of the search parameters
//! budget             u32, nonadjacency budget of the current sweep (u32::MAX = none)
//! flags              u8, bit 0: the budget prune has fired in this sweep
//! next index         u64, first frontier subtree not yet finished
//! prefix             u32 length + pair-state codes of that subtree's root
//! found              u32 count, then per entry u32 length + canonical bytes
//! stats              8 × u64: nodes, leaves, short-cycle, gamma, degree,
//!                    strong, symmetry, leaf-reject
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use super::engine::EngineStats;
use super::SearchError;

pub const MAGIC: &[u8; 5] = b"GFCK1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub params_hash: [u8; 32],
    pub budget: Option<u32>,
    pub gamma_fired: bool,
    pub next_index: u64,
    pub prefix: Vec<u8>,
    pub found: Vec<Vec<u8>>,
    pub stats: EngineStats,
}

impl Checkpoint {
    pub fn encode(&self) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&self.params_hash);
        b.extend_from_slice(&self.budget.unwrap_or(u32::MAX).to_le_bytes());
        b.push(self.gamma_fired as u8);
        b.extend_from_slice(&self.next_index.to_le_bytes());
        b.extend_from_slice(&(self.prefix.len() as u32).to_le_bytes());
        b.extend_from_slice(&self.prefix);
        b.extend_from_slice(&(self.found.len() as u32).to_le_bytes());
        for f in &self.found {
            b.extend_from_slice(&(f.len() as u32).to_le_bytes());
            b.extend_from_slice(f);
        }
        let s = &self.stats;
        let p = &s.prunes;
        for v in [s.nodes, s.leaves, p.short_cycle, p.gamma, p.degree, p.strong, p.symmetry, p.leaf_reject] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }

    pub fn decode(data: &[u8]) -> Result<Self, SearchError> {
        let mut r = Reader { data, pos: 0 };
        if r.take(5)? != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let params_hash: [u8; 32] = r.take(32)?.try_into().expect("32 bytes");
        let budget = match r.u32()? {
            u32::MAX => None,
            b => Some(b),
        };
        let flags = r.take(1)?[0];
        if flags > 1 {
            return Err(corrupt("unknown flag bits"));
        }
        let next_index = r.u64()?;
        let len = r.u32()? as usize;
        let prefix = r.take(len)?.to_vec();
        if prefix.iter().any(|&c| c > 3) {
            return Err(corrupt("bad pair-state code"));
        }
        let count = r.u32()? as usize;
        let mut found = Vec::with_capacity(count.min(1 << 16));
        for _ in 0..count {
            let len = r.u32()? as usize;
            found.push(r.take(len)?.to_vec());
        }
        let mut vals = [0u64; 8];
        for v in &mut vals {
            *v = r.u64()?;
        }
        if r.pos != data.len() {
            return Err(corrupt("trailing bytes"));
        }
        let mut stats = EngineStats { nodes: vals[0], leaves: vals[1], ..Default::default() };
        stats.prunes.short_cycle = vals[2];
        stats.prunes.gamma = vals[3];
        stats.prunes.degree = vals[4];
        stats.prunes.strong = vals[5];
        stats.prunes.symmetry = vals[6];
        stats.prunes.leaf_reject = vals[7];
        Ok(Self {
            params_hash,
            budget,
            gamma_fired: flags & 1 == 1,
            next_index,
            prefix,
            found,
            stats,
        })
    }

    /// Writes via a temporary file and rename so a crash never leaves a torn file.
    pub fn save(&self, path: &Path) -> Result<(), SearchError> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.encode())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Option<Self>, SearchError> {
        match fs::read(path) {
            Ok(data) => Self::decode(&data).map(Some),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

fn corrupt(msg: &str) -> SearchError {
    SearchError::Checkpoint(msg.to_string())
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SearchError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| corrupt("truncated"))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, SearchError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, SearchError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let mut stats = EngineStats { nodes: 99, leaves: 7, ..Default::default() };
        stats.prunes.gamma = 3;
        Checkpoint {
            params_hash: [7; 32],
            budget: Some(8),
            gamma_fired: true,
            next_index: 12,
            prefix: vec![1, 1, 2, 0, 3, 3],
            found: vec![vec![0xab, 0xcd], vec![]],
            stats,
        }
    }

    #[test]
    fn round_trip() {
        let cp = sample();
        let bytes = cp.encode();
        assert_eq!(&bytes[..5], b"GFCK1");
        assert_eq!(Checkpoint::decode(&bytes).unwrap(), cp);
        let none = Checkpoint { budget: None, ..sample() };
        assert_eq!(Checkpoint::decode(&none.encode()).unwrap().budget, None);
    }

    #[test]
    fn rejects_corruption() {
        let bytes = sample().encode();
        assert!(Checkpoint::decode(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Checkpoint::decode(&extra).is_err());
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(Checkpoint::decode(&magic).is_err());
        let mut code = bytes;
        code[5 + 32 + 4 + 1 + 8 + 4] = 9;
        assert!(Checkpoint::decode(&code).is_err());
    }
}
