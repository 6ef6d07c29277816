//! The `arclist v1` text format.
//!
//! Line 1 holds the order `n`; every following line holds one arc `u v`
//! (0-based decimal, single space, LF endings). Writers emit arcs in
//! lexicographic order. The reader accepts any order and tolerates a
//! trailing newline or blank lines, but rejects loops and repeated arcs.

use thiserror::Error;

use crate::digraph::{Digraph, DigraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArclistError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: DigraphError,
    },
}

pub fn write(d: &Digraph) -> String {
    let mut s = format!("{}\n", d.order());
    for (u, v) in d.arcs() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn parse(text: &str) -> Result<Digraph, ArclistError> {
    let mut lines = text.split('\n').enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (first_idx, first) = lines.next().ok_or(ArclistError::Empty)?;
    let n: usize = first.trim().parse().map_err(|_| ArclistError::Syntax {
        line: first_idx + 1,
        msg: format!("expected vertex count, found {first:?}"),
    })?;
    let mut d = Digraph::empty(n).map_err(|source| ArclistError::Invalid { line: first_idx + 1, source })?;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v] = fields.as_slice() else {
            return Err(ArclistError::Syntax {
                line: line_no,
                msg: format!("expected `u v`, found {line:?}"),
            });
        };
        let parse_vertex = |s: &str| {
            s.parse::<usize>().map_err(|_| ArclistError::Syntax {
                line: line_no,
                msg: format!("bad vertex {s:?}"),
            })
        };
        let (u, v) = (parse_vertex(u)?, parse_vertex(v)?);
        d = d
            .with_arc(u, v)
            .map_err(|source| ArclistError::Invalid { line: line_no, source })?;
    }
    Ok(d)
}
