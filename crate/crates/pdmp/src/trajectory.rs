//! Observed jump chains.
//!
//! A trajectory is the sequence of jump records `(Tₙ, Sₙ, Zₙ⁻, Zₙ, forced)`
//! produced by one simulation run, stored column-wise so that points can be
//! handed out as borrowed slices. The CSV layout is
//! `n,T,S,Z_minus,Z,forced` with a leading `# seed=<u64>` metadata line;
//! floats use the shortest round-trip decimal form.

use std::io::{self, Write};

/// One jump of the embedded chain, borrowed from a [`Trajectory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord<'a> {
    /// 1-based jump index.
    pub index: usize,
    /// Jump time `Tₙ`.
    pub time: f64,
    /// Inter-jump time `Sₙ = Tₙ - Tₙ₋₁`.
    pub gap: f64,
    /// Pre-jump location `Zₙ⁻`.
    pub pre: &'a [f64],
    /// Post-jump location `Zₙ`.
    pub post: &'a [f64],
    /// Whether the jump was forced by hitting the boundary.
    pub forced: bool,
}

/// A simulated jump chain together with the RNG key that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    x0: Vec<f64>,
    seed: u64,
    stream: u64,
    times: Vec<f64>,
    gaps: Vec<f64>,
    pre: Vec<f64>,
    post: Vec<f64>,
    forced: Vec<bool>,
}

impl Trajectory {
    pub(crate) fn with_capacity(x0: &[f64], seed: u64, stream: u64, n: usize) -> Self {
        let dim = x0.len();
        Self {
            dim,
            x0: x0.to_vec(),
            seed,
            stream,
            times: Vec::with_capacity(n),
            gaps: Vec::with_capacity(n),
            pre: Vec::with_capacity(n * dim),
            post: Vec::with_capacity(n * dim),
            forced: Vec::with_capacity(n),
        }
    }

    pub(crate) fn push(&mut self, time: f64, gap: f64, pre: &[f64], post: &[f64], forced: bool) {
        self.times.push(time);
        self.gaps.push(gap);
        self.pre.extend_from_slice(pre);
        self.post.extend_from_slice(post);
        self.forced.push(forced);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Record `i` (0-based position, 1-based `index` field).
    pub fn record(&self, i: usize) -> JumpRecord<'_> {
        let d = self.dim;
        JumpRecord {
            index: i + 1,
            time: self.times[i],
            gap: self.gaps[i],
            pre: &self.pre[i * d..(i + 1) * d],
            post: &self.post[i * d..(i + 1) * d],
            forced: self.forced[i],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = JumpRecord<'_>> {
        (0..self.len()).map(move |i| self.record(i))
    }

    /// Serialize as CSV. Multi-dimensional points join their coordinates
    /// with `;` inside the `Z_minus` / `Z` fields.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# seed={}", self.seed)?;
        writeln!(out, "# stream={}", self.stream)?;
        writeln!(out, "n,T,S,Z_minus,Z,forced")?;
        for rec in self.iter() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                rec.index,
                rec.time,
                rec.gap,
                join_point(rec.pre),
                join_point(rec.post),
                rec.forced
            )?;
        }
        Ok(())
    }
}

fn join_point(p: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in p.iter().enumerate() {
        if i > 0 {
            s.push(';');
        }
        s.push_str(&format!("{v}"));
    }
    s
}
