//! Deterministic synthetic metric graphs.
//!
//! Random instances use ChaCha8 seeded from the 64-bit seed, so a given
//! `(spec, seed)` always yields byte-identical JSON.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// One loop of total `length` split into `vertices` equal edges (at least 3).
    Cycle { length: f64, vertices: usize },
    /// Loops of the given lengths sharing one centre vertex.
    Wedge { lengths: Vec<f64> },
    /// Two junctions joined by three paths of lengths `a`, `b`, `c`.
    Theta { a: f64, b: f64, c: f64 },
    /// Complete graph on `n` vertices with every edge of length `length`.
    Complete { n: usize, length: f64 },
    /// Connected simple graph with `n` vertices and `m` edges, lengths uniform
    /// in `[0.5, 2.0)`. `m = n - 1` gives a random tree.
    Random { n: usize, m: usize, seed: u64 },
}

impl GeneratorSpec {
    pub fn cycle(length: f64) -> Self {
        GeneratorSpec::Cycle {
            length,
            vertices: 4,
        }
    }
}

pub const RANDOM_LENGTH_MIN: f64 = 0.5;
pub const RANDOM_LENGTH_MAX: f64 = 2.0;

fn check_length(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("length {x} must be positive and finite")))
    }
}

struct Builder {
    vertices: Vec<String>,
    edges: Vec<(String, String, String, f64)>,
}

impl Builder {
    fn new() -> Self {
        Self {
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn vertex(&mut self, id: impl Into<String>) -> String {
        let id = id.into();
        self.vertices.push(id.clone());
        id
    }

    fn edge(&mut self, u: &str, v: &str, length: f64) {
        let id = format!("e{}", self.edges.len());
        self.edges.push((id, u.to_string(), v.to_string(), length));
    }

    /// Path from `from` to `to` of total `length` in `pieces` equal edges.
    fn path(&mut self, prefix: &str, from: &str, to: &str, length: f64, pieces: usize) {
        let step = length / pieces as f64;
        let mut prev = from.to_string();
        for i in 1..pieces {
            let v = self.vertex(format!("{prefix}{i}"));
            self.edge(&prev, &v, step);
            prev = v;
        }
        self.edge(&prev, to, step);
    }

    fn build(self) -> Result<MetricGraph> {
        Ok(MetricGraph::new(self.vertices, self.edges)?)
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<MetricGraph> {
    let mut b = Builder::new();
    match *spec {
        GeneratorSpec::Cycle { length, vertices } => {
            check_length(length)?;
            if vertices < 3 {
                return Err(Error::InvalidParameter(format!(
                    "a simple cycle needs at least 3 vertices, got {vertices}"
                )));
            }
            let start = b.vertex("v0");
            b.path("v", &start, &start, length, vertices);
        }
        GeneratorSpec::Wedge { ref lengths } => {
            if lengths.is_empty() {
                return Err(Error::InvalidParameter("wedge needs at least one loop".into()));
            }
            let centre = b.vertex("c");
            for (i, &l) in lengths.iter().enumerate() {
                check_length(l)?;
                b.path(&format!("p{i}_"), &centre, &centre, l, 3);
            }
        }
        GeneratorSpec::Theta { a, b: len_b, c } => {
            let (u, v) = (b.vertex("u"), b.vertex("v"));
            for (name, l) in [("a", a), ("b", len_b), ("c", c)] {
                check_length(l)?;
                b.path(name, &u, &v, l, 2);
            }
        }
        GeneratorSpec::Complete { n, length } => {
            check_length(length)?;
            if n == 0 {
                return Err(Error::InvalidParameter("complete graph needs n >= 1".into()));
            }
            let names: Vec<String> = (0..n).map(|i| b.vertex(format!("v{i}"))).collect();
            for i in 0..n {
                for j in i + 1..n {
                    b.edge(&names[i], &names[j], length);
                }
            }
        }
        GeneratorSpec::Random { n, m, seed } => random_graph(&mut b, n, m, seed)?,
    }
    b.build()
}

fn random_graph(b: &mut Builder, n: usize, m: usize, seed: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("random graph needs n >= 1".into()));
    }
    let max_edges = n * (n - 1) / 2;
    if m + 1 < n || m > max_edges {
        return Err(Error::InvalidParameter(format!(
            "a connected simple graph on {n} vertices has between {} and {max_edges} edges, got {m}",
            n - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..n).map(|i| b.vertex(format!("v{i}"))).collect();
    let mut present = vec![false; n * n];
    let mut pairs = Vec::with_capacity(m);
    // random recursive spanning tree keeps it connected
    for i in 1..n {
        let j = rng.gen_range(0..i);
        present[j * n + i] = true;
        pairs.push((j, i));
    }
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !present[i * n + j])
        .collect();
    rest.shuffle(&mut rng);
    pairs.extend(rest.into_iter().take(m - (n - 1)));
    for (i, j) in pairs {
        let length = rng.gen_range(RANDOM_LENGTH_MIN..RANDOM_LENGTH_MAX);
        b.edge(&names[i], &names[j], length);
    }
    Ok(())
}
