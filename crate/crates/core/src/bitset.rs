/// One `p`-bit set per node, stored flat as `ceil(p/64)` words per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSets {
    words: usize,
    partitions: usize,
    bits: Vec<u64>,
}

impl PartitionSets {
    pub fn new(nodes: usize, partitions: usize) -> Self {
        let words = partitions.div_ceil(64).max(1);
        PartitionSets {
            words,
            partitions,
            bits: vec![0; nodes * words],
        }
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }

    pub fn nodes(&self) -> usize {
        self.bits.len() / self.words
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn insert(&mut self, v: usize, s: usize) -> bool {
        let w = &mut self.bits[v * self.words + s / 64];
        let mask = 1u64 << (s % 64);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    #[inline]
    pub fn contains(&self, v: usize, s: usize) -> bool {
        self.bits[v * self.words + s / 64] & (1u64 << (s % 64)) != 0
    }

    pub fn count(&self, v: usize) -> u32 {
        self.row(v).iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self, v: usize) -> bool {
        self.row(v).iter().all(|&w| w == 0)
    }

    /// Partitions in `v`'s set, ascending.
    pub fn iter(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        iter_words(self.row(v))
    }

    /// `self[dst] |= other[src]`.
    pub fn union_from(&mut self, dst: usize, other: &PartitionSets, src: usize) {
        let (a, b) = (dst * self.words, src * other.words);
        for i in 0..self.words {
            self.bits[a + i] |= other.bits[b + i];
        }
    }

    /// Partitions in `self[a] ∪ self[b]`, ascending.
    pub fn union_iter(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        let (ra, rb) = (self.row(a), self.row(b));
        (0..self.words).flat_map(move |i| bits_of(ra[i] | rb[i], i))
    }

    pub fn intersection_iter(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        let (ra, rb) = (self.row(a), self.row(b));
        (0..self.words).flat_map(move |i| bits_of(ra[i] & rb[i], i))
    }

    pub fn total(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn heap_bytes(&self) -> usize {
        8 * self.bits.capacity()
    }
}

fn iter_words(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| bits_of(w, i))
}

fn bits_of(mut w: u64, word: usize) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if w == 0 {
            return None;
        }
        let b = w.trailing_zeros() as usize;
        w &= w - 1;
        Some(word * 64 + b)
    })
}
