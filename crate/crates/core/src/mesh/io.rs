use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::PolyMesh;
use crate::{Error, Point, Result};

/// Serializes a mesh in the `polymesh 1` text format.
///
/// Coordinates use the shortest decimal that round-trips, so
/// `read_mesh(write_mesh(m)) == m` bit for bit.
pub fn write_mesh<W: Write>(mesh: &PolyMesh, mut out: W) -> std::io::Result<()> {
    let mut s = String::new();
    writeln!(s, "polymesh 1").unwrap();
    writeln!(s, "nodes {}", mesh.num_nodes()).unwrap();
    for p in mesh.nodes() {
        writeln!(s, "{:?} {:?}", p.x, p.y).unwrap();
    }
    writeln!(s, "elements {}", mesh.num_elements()).unwrap();
    for ring in mesh.elements() {
        write!(s, "{}", ring.len()).unwrap();
        for v in ring {
            write!(s, " {v}").unwrap();
        }
        s.push('\n');
    }
    for (name, set) in mesh.node_sets() {
        writeln!(s, "nodeset {name} {}", set.len()).unwrap();
        for i in set {
            writeln!(s, "{i}").unwrap();
        }
    }
    for (name, set) in mesh.edge_sets() {
        writeln!(s, "edgeset {name} {}", set.len()).unwrap();
        for (e, k) in set {
            writeln!(s, "{e} {k}").unwrap();
        }
    }
    out.write_all(s.as_bytes())
}

pub fn save_mesh(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_mesh(mesh, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<PolyMesh> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_mesh(file, &path.display().to_string())
}

/// Parses the `polymesh 1` format; `source` names the input in diagnostics.
pub fn read_mesh<R: Read>(input: R, source: &str) -> Result<PolyMesh> {
    let mut lines = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        let body = line.split('#').next().unwrap_or("").trim().to_string();
        if !body.is_empty() {
            lines.push((i + 1, body));
        }
    }
    let mut p = Parser { lines, pos: 0, source };

    let (no, header) = p.next("header `polymesh 1`")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["polymesh", "1"] {
        return Err(p.err(no, format!("expected header `polymesh 1`, found `{header}`")));
    }

    let n = p.count("nodes")?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, line) = p.next("node coordinates")?;
        let v: Vec<f64> = p.numbers(no, &line)?;
        if v.len() != 2 {
            return Err(p.err(no, format!("expected `x y`, found {} values", v.len())));
        }
        nodes.push(Point::new(v[0], v[1]));
    }

    let m = p.count("elements")?;
    let mut elements = Vec::with_capacity(m);
    for _ in 0..m {
        let (no, line) = p.next("element ring")?;
        let v: Vec<usize> = p.numbers(no, &line)?;
        match v.split_first() {
            Some((&k, rest)) if k == rest.len() => elements.push(rest.to_vec()),
            Some((&k, rest)) => {
                return Err(p.err(no, format!("element declares {k} vertices but lists {}", rest.len())))
            }
            None => unreachable!("blank lines are skipped"),
        }
    }

    let mut node_sets = BTreeMap::new();
    let mut edge_sets = BTreeMap::new();
    while let Some((no, line)) = p.peek() {
        let words: Vec<&str> = line.split_whitespace().collect();
        let (kind, name, count) = match words.as_slice() {
            [kind @ ("nodeset" | "edgeset"), name, count] => {
                let c = count
                    .parse::<usize>()
                    .map_err(|_| p.err(no, format!("invalid count `{count}`")))?;
                (kind.to_string(), name.to_string(), c)
            }
            _ => return Err(p.err(no, format!("expected `nodeset <name> n` or `edgeset <name> n`, found `{line}`"))),
        };
        p.pos += 1;
        if kind == "nodeset" {
            let mut set = Vec::with_capacity(count);
            for _ in 0..count {
                let (no, line) = p.next("node index")?;
                let v: Vec<usize> = p.numbers(no, &line)?;
                if v.len() != 1 {
                    return Err(p.err(no, "expected one node index".into()));
                }
                set.push(v[0]);
            }
            if node_sets.insert(name.clone(), set).is_some() {
                return Err(p.err(no, format!("duplicate node set `{name}`")));
            }
        } else {
            let mut set = Vec::with_capacity(count);
            for _ in 0..count {
                let (no, line) = p.next("edge pair")?;
                let v: Vec<usize> = p.numbers(no, &line)?;
                if v.len() != 2 {
                    return Err(p.err(no, "expected `element local_edge`".into()));
                }
                set.push((v[0], v[1]));
            }
            if edge_sets.insert(name.clone(), set).is_some() {
                return Err(p.err(no, format!("duplicate edge set `{name}`")));
            }
        }
    }

    PolyMesh::new(nodes, elements, node_sets, edge_sets)
}

struct Parser<'a> {
    lines: Vec<(usize, String)>,
    pos: usize,
    source: &'a str,
}

impl Parser<'_> {
    fn err(&self, line: usize, message: String) -> Error {
        Error::Parse {
            path: self.source.into(),
            line,
            message,
        }
    }

    fn peek(&self) -> Option<(usize, String)> {
        self.lines.get(self.pos).cloned()
    }

    fn next(&mut self, what: &str) -> Result<(usize, String)> {
        match self.peek() {
            Some(l) => {
                self.pos += 1;
                Ok(l)
            }
            None => {
                let last = self.lines.last().map_or(0, |l| l.0);
                Err(self.err(last, format!("unexpected end of file, expected {what}")))
            }
        }
    }

    fn count(&mut self, keyword: &str) -> Result<usize> {
        let (no, line) = self.next(keyword)?;
        let mut words = line.split_whitespace();
        if words.next() != Some(keyword) {
            return Err(self.err(no, format!("expected `{keyword} <count>`, found `{line}`")));
        }
        match (words.next().map(str::parse::<usize>), words.next()) {
            (Some(Ok(n)), None) => Ok(n),
            _ => Err(self.err(no, format!("expected `{keyword} <count>`, found `{line}`"))),
        }
    }

    fn numbers<T: std::str::FromStr>(&self, no: usize, line: &str) -> Result<Vec<T>> {
        line.split_whitespace()
            .map(|w| w.parse::<T>().map_err(|_| self.err(no, format!("invalid number `{w}`"))))
            .collect()
    }
}
