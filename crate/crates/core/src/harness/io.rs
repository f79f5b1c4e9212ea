//! File formats.
//!
//! Graphs are plain edge lists: a header line `n <count>` followed by one
//! `u v` pair per line, 0-indexed. Blank lines and lines starting with `#`
//! are ignored. Sequences and maps are JSON.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

pub fn format_graph(g: &SimpleGraph) -> String {
    let mut out = format!("n {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").expect("writing to a String");
    }
    out
}

pub fn parse_graph(text: &str, context: &str) -> Result<SimpleGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| Error::parse(context, "empty graph file"))?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", count] => count
            .parse::<usize>()
            .map_err(|e| Error::parse(context, format!("bad vertex count: {e}")))?,
        _ => return Err(Error::parse(context, format!("expected header `n <count>`, got `{header}`"))),
    };
    let mut g = SimpleGraph::new(n);
    for (lineno, line) in lines {
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(format!("{context}:{lineno}"), e))?;
        let [u, v] = nums[..] else {
            return Err(Error::parse(format!("{context}:{lineno}"), "expected `u v`"));
        };
        if u >= n || v >= n || u == v {
            return Err(Error::parse(
                format!("{context}:{lineno}"),
                format!("edge ({u}, {v}) invalid for {n} vertices"),
            ));
        }
        g.add_edge(u, v);
    }
    Ok(g)
}

pub fn read_graph(path: &Path) -> Result<SimpleGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text, &path.display().to_string())
}

pub fn write_graph(path: &Path, g: &SimpleGraph) -> Result<()> {
    std::fs::write(path, format_graph(g)).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| Error::parse(path.display().to_string(), e))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::DegreeSequence;

    #[test]
    fn graph_round_trip() {
        let g = SimpleGraph::cycle(5);
        assert_eq!(parse_graph(&format_graph(&g), "mem").unwrap(), g);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_graph("# c4\nn 4\n\n0 1\n1 2\n2 3\n3 0\n", "mem").unwrap();
        assert_eq!(g, SimpleGraph::cycle(4));
    }

    #[test]
    fn errors_carry_the_line() {
        let err = parse_graph("n 3\n0 1\n0 7\n", "g.txt").unwrap_err().to_string();
        assert!(err.starts_with("g.txt:3"), "{err}");
        assert!(parse_graph("3\n", "g.txt").is_err());
        assert!(parse_graph("n 3\n1 1\n", "g.txt").is_err());
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let gp = dir.path().join("g.txt");
        write_graph(&gp, &SimpleGraph::complete(4)).unwrap();
        assert_eq!(read_graph(&gp).unwrap(), SimpleGraph::complete(4));
        let sp = dir.path().join("s.json");
        let seq = DegreeSequence::new(vec![3, 2, 2, 1]);
        write_json(&sp, &seq).unwrap();
        assert_eq!(std::fs::read_to_string(&sp).unwrap(), "[3,2,2,1]\n");
        assert_eq!(read_json::<DegreeSequence>(&sp).unwrap(), seq);
        let missing = read_graph(&dir.path().join("nope.txt")).unwrap_err();
        assert!(missing.to_string().contains("nope.txt"));
    }
}
