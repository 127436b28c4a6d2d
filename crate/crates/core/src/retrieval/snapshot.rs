//! Binary index snapshots.
//!
//! Layout (little endian): magic `VKBI`, `u32` version, BM25 `k1` and `b` as
//! `f64`, `u64` document count followed by `(u32 id length, id bytes, u32
//! token count)` per document, then `u64` term count followed by `(u32 term
//! length, term bytes, u32 postings length, (u32 ordinal, u32 tf)*)` per term
//! in byte order of the term.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{Bm25Params, InvertedIndex, Posting, RetrievalError};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"VKBI";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn save_snapshot(index: &InvertedIndex, path: impl AsRef<Path>) -> Result<(), RetrievalError> {
    let path = path.as_ref();
    let err = |e: std::io::Error| RetrievalError::Snapshot {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut out = BufWriter::new(fs::File::create(path).map_err(err)?);
    out.write_all(&encode(index)).map_err(err)?;
    out.flush().map_err(err)
}

fn encode(index: &InvertedIndex) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.extend_from_slice(&index.params.k1.to_le_bytes());
    buf.extend_from_slice(&index.params.b.to_le_bytes());
    buf.extend_from_slice(&(index.doc_ids.len() as u64).to_le_bytes());
    for (id, len) in index.doc_ids.iter().zip(&index.doc_lengths) {
        put_str(&mut buf, id);
        buf.extend_from_slice(&len.to_le_bytes());
    }
    buf.extend_from_slice(&(index.postings.len() as u64).to_le_bytes());
    for (term, postings) in &index.postings {
        put_str(&mut buf, term);
        buf.extend_from_slice(&(postings.len() as u32).to_le_bytes());
        for p in postings {
            buf.extend_from_slice(&p.doc.to_le_bytes());
            buf.extend_from_slice(&p.tf.to_le_bytes());
        }
    }
    buf
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
    buf.extend_from_slice(s.as_bytes());
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<InvertedIndex, RetrievalError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| RetrievalError::Snapshot {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    decode(&bytes).map_err(|failure| match failure {
        DecodeFailure::Version(found) => RetrievalError::SnapshotVersion {
            path: path.to_path_buf(),
            found,
            expected: SNAPSHOT_VERSION,
        },
        DecodeFailure::Corrupt(message) => RetrievalError::Snapshot {
            path: path.to_path_buf(),
            message,
        },
    })
}

enum DecodeFailure {
    Version(u32),
    Corrupt(String),
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeFailure> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| DecodeFailure::Corrupt("truncated snapshot".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, DecodeFailure> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, DecodeFailure> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, DecodeFailure> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, DecodeFailure> {
        let len = self.u32()? as usize;
        String::from_utf8(self.take(len)?.to_vec())
            .map_err(|_| DecodeFailure::Corrupt("invalid UTF-8 in snapshot".into()))
    }
}

fn decode(bytes: &[u8]) -> Result<InvertedIndex, DecodeFailure> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != SNAPSHOT_MAGIC {
        return Err(DecodeFailure::Corrupt(
            "not an index snapshot (bad magic)".into(),
        ));
    }
    let version = r.u32()?;
    if version != SNAPSHOT_VERSION {
        return Err(DecodeFailure::Version(version));
    }
    let params = Bm25Params {
        k1: r.f64()?,
        b: r.f64()?,
    };
    let n_docs = r.u64()? as usize;
    let mut doc_ids = Vec::new();
    let mut doc_lengths = Vec::new();
    for _ in 0..n_docs {
        doc_ids.push(r.string()?);
        doc_lengths.push(r.u32()?);
    }
    let n_terms = r.u64()?;
    let mut postings = BTreeMap::new();
    for _ in 0..n_terms {
        let term = r.string()?;
        let n = r.u32()? as usize;
        let mut list = Vec::new();
        for _ in 0..n {
            let doc = r.u32()?;
            let tf = r.u32()?;
            if doc as usize >= n_docs {
                return Err(DecodeFailure::Corrupt(format!(
                    "posting for unknown document {doc}"
                )));
            }
            list.push(Posting { doc, tf });
        }
        postings.insert(term, list);
    }
    if r.pos != bytes.len() {
        return Err(DecodeFailure::Corrupt(
            "trailing bytes after snapshot".into(),
        ));
    }
    Ok(InvertedIndex::from_parts(
        params,
        doc_ids,
        doc_lengths,
        postings,
    ))
}
