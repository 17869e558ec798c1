//! Edge-list files.
//!
//! ```text
//! k n m
//! v_1 ... v_k      (m lines, vertices increasing, lines sorted)
//! ```
//!
//! ASCII decimals separated by single spaces, LF line endings.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

pub fn write_edge_list(h: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    write_edge_list_to(h, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_edge_list_to(h: &Hypergraph, w: &mut impl Write) -> Result<()> {
    writeln!(w, "{} {} {}", h.k(), h.n(), h.edge_count())?;
    for e in h.edges() {
        let mut first = true;
        for v in e {
            if !first {
                w.write_all(b" ")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Hypergraph> {
    read_edge_list_from(fs::File::open(path)?)
}

pub fn read_edge_list_from(r: impl Read) -> Result<Hypergraph> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines().enumerate();

    let (header_no, header) = match lines.next() {
        Some((i, line)) => (i + 1, line?),
        None => return Err(parse_err(1, "missing header line")),
    };
    let header = parse_numbers(&header, header_no)?;
    let [k, n, m] = header[..] else {
        return Err(parse_err(header_no, "header must be `k n m`"));
    };
    let (k, n, m) = (k as usize, n as usize, m as usize);
    if k < 2 {
        return Err(parse_err(header_no, format!("uniformity {k} is below 2")));
    }

    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vs = parse_numbers(&line, line_no)?;
        if vs.len() != k {
            return Err(parse_err(line_no, format!("expected {k} vertices, found {}", vs.len())));
        }
        if let Some(&v) = vs.iter().find(|&&v| v as usize >= n) {
            return Err(parse_err(line_no, format!("vertex {v} out of range 0..{n}")));
        }
        let mut sorted = vs.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(parse_err(line_no, "edge repeats a vertex"));
        }
        edges.push(vs);
    }
    if edges.len() != m {
        return Err(parse_err(
            header_no,
            format!("header declares {m} edges, file has {}", edges.len()),
        ));
    }
    let (h, dups) = Hypergraph::with_duplicates(n, k, &edges)?;
    if dups > 0 {
        log::warn!("edge list contained {dups} duplicate edge(s); kept one copy of each");
    }
    Ok(h)
}

fn parse_numbers(line: &str, line_no: usize) -> Result<Vec<u32>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u32>()
                .map_err(|_| parse_err(line_no, format!("not a non-negative integer: {tok:?}")))
        })
        .collect()
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
