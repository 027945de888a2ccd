//! Bounding-volume hierarchy over cell boxes for horizon-ball queries.

use super::domain::Point;

#[derive(Debug, Clone)]
struct Node {
    lo: Point,
    hi: Point,
    // children when `count == 0`, otherwise a leaf range into `order`
    left: u32,
    right: u32,
    start: u32,
    count: u32,
}

#[derive(Debug, Clone)]
pub struct CellTree {
    nodes: Vec<Node>,
    order: Vec<u32>,
    dim: usize,
}

const LEAF_SIZE: usize = 8;

impl CellTree {
    pub fn build(lo: &[Point], hi: &[Point], dim: usize) -> Self {
        let n = lo.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let centers: Vec<Point> = (0..n)
            .map(|i| {
                let mut c = [0.0; 3];
                for k in 0..3 {
                    c[k] = 0.5 * (lo[i][k] + hi[i][k]);
                }
                c
            })
            .collect();
        let mut tree = Self { nodes: Vec::new(), order: Vec::new(), dim };
        if n > 0 {
            tree.split(&mut order, 0, lo, hi, &centers);
        }
        tree.order = order;
        tree
    }

    fn split(&mut self, order: &mut [u32], start: usize, lo: &[Point], hi: &[Point], centers: &[Point]) -> u32 {
        let mut blo = [f64::INFINITY; 3];
        let mut bhi = [f64::NEG_INFINITY; 3];
        let mut clo = [f64::INFINITY; 3];
        let mut chi = [f64::NEG_INFINITY; 3];
        for &i in order.iter() {
            let i = i as usize;
            for k in 0..3 {
                blo[k] = blo[k].min(lo[i][k]);
                bhi[k] = bhi[k].max(hi[i][k]);
                clo[k] = clo[k].min(centers[i][k]);
                chi[k] = chi[k].max(centers[i][k]);
            }
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { lo: blo, hi: bhi, left: 0, right: 0, start: start as u32, count: order.len() as u32 });
        if order.len() <= LEAF_SIZE {
            return id;
        }
        let axis = (0..self.dim)
            .max_by(|&a, &b| (chi[a] - clo[a]).total_cmp(&(chi[b] - clo[b])))
            .unwrap_or(0);
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            centers[a as usize][axis]
                .total_cmp(&centers[b as usize][axis])
                .then(a.cmp(&b))
        });
        let (left_part, right_part) = order.split_at_mut(mid);
        let left = self.split(left_part, start, lo, hi, centers);
        let right = self.split(right_part, start + mid, lo, hi, centers);
        let node = &mut self.nodes[id as usize];
        node.left = left;
        node.right = right;
        node.count = 0;
        id
    }

    /// Calls `f` for every cell whose box meets the open ball; visit order is deterministic.
    pub fn for_each_candidate<F: FnMut(usize)>(&self, c: &Point, r: f64, mut f: F) {
        if self.nodes.is_empty() {
            return;
        }
        let r2 = r * r;
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            let mut d2 = 0.0;
            for k in 0..self.dim {
                let v = if c[k] < node.lo[k] {
                    node.lo[k] - c[k]
                } else if c[k] > node.hi[k] {
                    c[k] - node.hi[k]
                } else {
                    0.0
                };
                d2 += v * v;
            }
            if d2 >= r2 {
                continue;
            }
            if node.count > 0 {
                let s = node.start as usize;
                for &i in &self.order[s..s + node.count as usize] {
                    f(i as usize);
                }
            } else {
                stack.push(node.right);
                stack.push(node.left);
            }
        }
    }

    /// Cells whose box contains `p`.
    pub fn locate(&self, p: &Point, lo: &[Point], hi: &[Point]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0u32];
        if self.nodes.is_empty() {
            return out;
        }
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if (0..self.dim).any(|k| p[k] < node.lo[k] || p[k] > node.hi[k]) {
                continue;
            }
            if node.count > 0 {
                let s = node.start as usize;
                for &i in &self.order[s..s + node.count as usize] {
                    let i = i as usize;
                    if (0..self.dim).all(|k| p[k] >= lo[i][k] && p[k] <= hi[i][k]) {
                        out.push(i);
                    }
                }
            } else {
                stack.push(node.right);
                stack.push(node.left);
            }
        }
        out
    }
}
