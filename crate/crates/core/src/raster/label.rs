use alloc::vec;
use alloc::vec::Vec;

use super::{BinaryMask, LabelMap};

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        // slot 0 is background and never used as a provisional label
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// 8-connected component labeling (two passes over a union-find).
///
/// Labels are `1..=N` in raster-scan order of each component's first pixel.
pub fn connected_components(mask: &BinaryMask) -> LabelMap {
    let (w, h) = mask.dims();
    let mut prov = vec![0u32; w * h];
    let mut uf = UnionFind::new();

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let mut label = 0u32;
            let mut visit = |l: u32, uf: &mut UnionFind| {
                if l != 0 {
                    label = if label == 0 { uf.find(l) } else { uf.union(label, l) };
                }
            };
            if x > 0 {
                visit(prov[y * w + x - 1], &mut uf);
            }
            if y > 0 {
                let up = (y - 1) * w;
                if x > 0 {
                    visit(prov[up + x - 1], &mut uf);
                }
                visit(prov[up + x], &mut uf);
                if x + 1 < w {
                    visit(prov[up + x + 1], &mut uf);
                }
            }
            prov[y * w + x] = if label == 0 { uf.make() } else { label };
        }
    }

    let mut remap = vec![0u32; uf.parent.len()];
    let mut next = 0u32;
    for l in prov.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = uf.find(*l) as usize;
        if remap[root] == 0 {
            next += 1;
            remap[root] = next;
        }
        *l = remap[root];
    }
    LabelMap::new(w, h, prov).expect("same dimensions")
}
