/// Binary indexed tree over `0..len` counting inserted keys.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    pub(crate) fn new(len: usize) -> Self {
        Self {
            tree: vec![0; len + 1],
        }
    }

    pub(crate) fn add(&mut self, key: usize) {
        let mut i = key + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of added keys strictly below `key`.
    pub(crate) fn count_below(&self, key: usize) -> u32 {
        let mut i = key;
        let mut acc = 0;
        while i > 0 {
            acc += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        acc
    }
}
