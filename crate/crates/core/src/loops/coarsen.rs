//! Collapsing clusters of adjacent punctures to single punctures.
//!
//! A block `B = {j..=k}` of consecutive punctures is enclosed by a disk whose
//! boundary reads `z_B = x_j ... x_k`. A class survives the collapse exactly when it
//! is conjugate into the subgroup generated by the `z_B`, which is free on them.
//! Its Stallings graph is a bouquet with one petal per block, and every generator
//! labels exactly one edge, so reading a word through it is deterministic.

use super::{Letter, LoopClass, LoopError};
use crate::configspace::Config;
use crate::rational::Q;

/// Partition of `1..=n` into consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    n: usize,
    blocks: Vec<(usize, usize)>,
    gaps: Option<Vec<Q>>,
}

impl Clustering {
    /// `blocks` are inclusive `(first, last)` index pairs in increasing order.
    pub fn new(n: usize, blocks: Vec<(usize, usize)>) -> Result<Self, LoopError> {
        let mut next = 1;
        for &(a, b) in &blocks {
            if a != next || b < a {
                return Err(LoopError::InvalidClustering(format!(
                    "block ({a}, {b}) does not start at {next}"
                )));
            }
            next = b + 1;
        }
        if next != n + 1 {
            return Err(LoopError::InvalidClustering(format!(
                "blocks cover 1..{} instead of 1..={n}",
                next
            )));
        }
        Ok(Self {
            n,
            blocks,
            gaps: None,
        })
    }

    /// Clustering from block sizes, left to right.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self, LoopError> {
        let mut blocks = Vec::with_capacity(sizes.len());
        let mut start = 1;
        for &s in sizes {
            if s == 0 {
                return Err(LoopError::InvalidClustering("empty block".into()));
            }
            blocks.push((start, start + s - 1));
            start += s;
        }
        Self::new(start - 1, blocks)
    }

    /// Records the x-gaps between adjacent blocks of `q`; they must be positive.
    pub fn with_config(mut self, q: &Config) -> Result<Self, LoopError> {
        if q.len() != self.n {
            return Err(LoopError::StrandMismatch {
                class: self.n,
                other: q.len(),
            });
        }
        let xs = q.sorted_x().ok_or(LoopError::ChartError)?;
        let gaps = self
            .blocks
            .windows(2)
            .map(|w| &xs[w[1].0 - 1] - &xs[w[0].1 - 1])
            .collect();
        self.gaps = Some(gaps);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn gaps(&self) -> Option<&[Q]> {
        self.gaps.as_deref()
    }

    pub fn block_of(&self, g: usize) -> usize {
        self.blocks
            .iter()
            .position(|&(a, b)| a <= g && g <= b)
            .expect("generator within range")
    }
}

/// Bouquet of petals. Vertex 0 is the base; the edge labeled `x_g` runs from
/// `tail[g]` to `head[g]`.
struct Petals {
    tail: Vec<usize>,
    head: Vec<usize>,
}

impl Petals {
    fn new(cl: &Clustering) -> Self {
        let mut tail = vec![0; cl.n + 1];
        let mut head = vec![0; cl.n + 1];
        let mut next_vertex = 1;
        for &(a, b) in &cl.blocks {
            let mut prev = 0;
            for g in a..=b {
                let to = if g == b {
                    0
                } else {
                    next_vertex += 1;
                    next_vertex - 1
                };
                tail[g] = prev;
                head[g] = to;
                prev = to;
            }
        }
        Self { tail, head }
    }

    fn start(&self, l: Letter) -> usize {
        let g = l.unsigned_abs() as usize;
        if l > 0 {
            self.tail[g]
        } else {
            self.head[g]
        }
    }

    fn end(&self, l: Letter) -> usize {
        let g = l.unsigned_abs() as usize;
        if l > 0 {
            self.head[g]
        } else {
            self.tail[g]
        }
    }
}

/// Pushes `c` forward through the collapse of each block to one puncture.
pub fn coarsen(c: &LoopClass, cl: &Clustering) -> Result<LoopClass, LoopError> {
    if c.n() != cl.n {
        return Err(LoopError::StrandMismatch {
            class: c.n(),
            other: cl.n,
        });
    }
    let k = cl.blocks.len();
    let word = c.word();
    if word.is_empty() {
        return Ok(LoopClass::trivial(k));
    }
    let petals = Petals::new(cl);

    // the path is forced; it must close up
    let mut at = petals.start(word[0]);
    let origin = at;
    let mut base_visits = Vec::new();
    for (i, &l) in word.iter().enumerate() {
        if petals.start(l) != at {
            return Err(LoopError::NotCoarsenable);
        }
        if at == 0 {
            base_visits.push(i);
        }
        at = petals.end(l);
    }
    if at != origin {
        return Err(LoopError::NotCoarsenable);
    }
    let Some(&first) = base_visits.first() else {
        return Err(LoopError::NotCoarsenable);
    };

    let mut rotated = word.to_vec();
    rotated.rotate_left(first);
    let mut out = Vec::new();
    let mut v = 0;
    for &l in &rotated {
        let from = v;
        v = petals.end(l);
        if from == 0 {
            let block = cl.block_of(l.unsigned_abs() as usize) as Letter + 1;
            out.push(if l > 0 { block } else { -block });
        }
    }
    Ok(LoopClass::from_checked(k, out))
}
