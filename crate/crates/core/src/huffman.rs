//! Dynamic Huffman coding over a changing weight table.
//!
//! The tree keeps its nodes in an explicit slot list. Slots `2k` and `2k+1`
//! hold two siblings and the root occupies the last slot. The list is kept
//! *pair ordered*: the heavier node of pair `k` weighs no more than the lighter
//! node of pair `k + 1`. Sorting each pair internally then yields a listing by
//! weight in which every node is adjacent to its sibling, so the tree is always
//! a Huffman tree for its leaf weights.
//!
//! A node's codeword bit is the parity of its slot (left/even = `0`).
//! Weight changes walk from the leaf to the root, first swapping each node with
//! the farthest node of equal weight, then applying the change. Unit
//! increments and decrements always preserve the ordering; larger changes can
//! break it, in which case the tree is rebuilt from its leaves.

use num_bigint::BigUint;

use crate::bits::{BitReader, BitStream};
use crate::error::{Error, Result};
use crate::header::{Encoded, ModelHeader};
use crate::model::{table_from_parts, Engine, Trajectory, Update, Variant};
use crate::numeric::{with_weight_class, WeightValue};
use crate::weight_model::{Alphabet, WeightTable};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node<W> {
    weight: W,
    parent: u32,
    slot: u32,
    /// Pair index holding the children; `NONE` for leaves.
    pair: u32,
    symbol: u8,
}

/// Huffman code tree maintained under weight changes.
///
/// Leaf nodes keep their index for the lifetime of the tree and internal node
/// `k` is always the parent created by the `k`-th merge of the last rebuild.
/// A rebuild replays only the merges that can differ from the previous one.
#[derive(Clone, Debug)]
pub struct HuffmanTree<W = BigUint> {
    nodes: Vec<Node<W>>,
    slots: Vec<u32>,
    leaf: [u32; 256],
    rebuilds: u64,
    /// Index of the first internal node; internal nodes follow all leaves.
    base: u32,
    /// Live leaves sorted by [`merge_order`] as of the last rebuild.
    order: Vec<u32>,
    /// Slot list produced by the last rebuild.
    trace: Vec<u32>,
    /// Leaves merged before merge `k` of the last rebuild.
    consumed: Vec<u32>,
    /// Leaves whose weight changed since the last rebuild.
    dirty: Vec<u32>,
    /// Internal nodes whose weight changed since the last rebuild.
    touched: Vec<u32>,
    /// Set when the bookkeeping above overflowed or a leaf was removed.
    stale: bool,
    tmp: W,
}

/// Beyond this many changes a rebuild starts from scratch.
const TRACKED: usize = 64;

impl<W: WeightValue> HuffmanTree<W> {
    /// Builds a tree whose leaves are the members of `table`, including
    /// zero-weight members.
    #[doc(alias = "build_tree")]
    pub fn build(table: &WeightTable<W>) -> Result<Self> {
        Self::from_weights(table.entries().map(|(s, w)| (s, w.clone())))
    }

    /// Builds a tree over explicit `(symbol, weight)` leaves.
    pub fn from_weights<I: IntoIterator<Item = (u8, W)>>(leaves: I) -> Result<Self> {
        let mut tree = HuffmanTree {
            nodes: Vec::new(),
            slots: Vec::new(),
            leaf: [NONE; 256],
            rebuilds: 0,
            base: 0,
            order: Vec::new(),
            trace: Vec::new(),
            consumed: Vec::new(),
            dirty: Vec::new(),
            touched: Vec::new(),
            stale: false,
            tmp: W::zero(),
        };
        for (s, w) in leaves {
            if tree.leaf[usize::from(s)] != NONE {
                return Err(Error::InvalidDistribution(format!("symbol {s} listed twice")));
            }
            let id = tree.nodes.len() as u32;
            tree.leaf[usize::from(s)] = id;
            tree.order.push(id);
            tree.nodes.push(Node { weight: w, parent: NONE, slot: NONE, pair: NONE, symbol: s });
        }
        let m = tree.order.len();
        if m == 0 {
            return Err(Error::EmptyModel);
        }
        tree.base = m as u32;
        for _ in 1..m {
            tree.nodes.push(Node { weight: W::zero(), parent: NONE, slot: NONE, pair: NONE, symbol: 0 });
        }
        let nodes = &tree.nodes;
        tree.order.sort_unstable_by(|&a, &b| merge_order(nodes, a, b));
        tree.construct_from(0);
        Ok(tree)
    }

    /// Rebuilds the tree from the leaves listed in `self.order`, which must be
    /// sorted by [`merge_order`], keeping the first `k0` merges of the last
    /// rebuild.
    ///
    /// Ties are broken deterministically: nodes are merged in order of weight,
    /// leaves before internal nodes, larger symbols before smaller ones and
    /// older internal nodes before newer ones. Within a pair the lighter node
    /// goes left; on equal weight a leaf goes left of an internal node, the
    /// smaller symbol left of the larger, the older internal node left of the
    /// newer.
    fn construct_from(&mut self, k0: usize) {
        let m = self.order.len();
        let base = self.base;
        self.slots.resize(2 * m - 1, NONE);
        self.consumed.resize(m, 0);
        let nodes = &mut self.nodes;
        let (order, slots, consumed) = (&self.order, &mut self.slots, &mut self.consumed);
        for k in 0..k0 {
            let parent = base + k as u32;
            nodes[parent as usize].pair = k as u32;
            for slot in [2 * k, 2 * k + 1] {
                let child = self.trace[slot];
                let node = &mut nodes[child as usize];
                node.parent = parent;
                node.slot = slot as u32;
                slots[slot] = child;
            }
        }
        // Only internal nodes on updated paths can carry stale sums.
        self.touched.sort_unstable();
        for &x in self.touched.iter().take_while(|&&x| ((x - base) as usize) < k0) {
            let k = (x - base) as usize;
            self.tmp.clone_from(&nodes[slots[2 * k] as usize].weight);
            self.tmp.add_assign_ref(&nodes[slots[2 * k + 1] as usize].weight);
            std::mem::swap(&mut nodes[x as usize].weight, &mut self.tmp);
        }
        let mut li = if k0 < m { consumed[k0] as usize } else { 0 };
        let mut ii = 2 * k0 - li;
        for k in k0..m - 1 {
            consumed[k] = li as u32;
            // Leaves win ties, so a leaf comes before an internal node of equal
            // weight and the leaf queue already runs from larger to smaller
            // symbols.
            let mut take = |nodes: &[Node<W>]| {
                if li < m && (ii == k || nodes[order[li] as usize].weight <= nodes[base as usize + ii].weight) {
                    li += 1;
                    order[li - 1]
                } else {
                    ii += 1;
                    base + ii as u32 - 1
                }
            };
            let a = take(nodes);
            let b = take(nodes);
            let (na, nb) = (&nodes[a as usize], &nodes[b as usize]);
            // `a` is never heavier than `b`. On a tie two leaves swap so the
            // smaller symbol goes left; otherwise `a` is the leaf or the older
            // internal node and stays left.
            let (left, right) =
                if na.pair == NONE && nb.pair == NONE && na.weight == nb.weight { (b, a) } else { (a, b) };
            let parent = base + k as u32;
            self.tmp.clone_from(&nodes[left as usize].weight);
            self.tmp.add_assign_ref(&nodes[right as usize].weight);
            let node = &mut nodes[parent as usize];
            std::mem::swap(&mut node.weight, &mut self.tmp);
            node.pair = k as u32;
            for (child, slot) in [(left, 2 * k), (right, 2 * k + 1)] {
                let node = &mut nodes[child as usize];
                node.parent = parent;
                node.slot = slot as u32;
                slots[slot] = child;
            }
        }
        let root = if m == 1 { order[0] } else { base + m as u32 - 2 };
        let node = &mut nodes[root as usize];
        node.slot = 2 * m as u32 - 2;
        node.parent = NONE;
        slots[2 * m - 2] = root;
        self.trace.clone_from(&self.slots);
        self.dirty.clear();
        self.touched.clear();
        self.stale = false;
    }

    /// Records a weight change at `node` for the next rebuild.
    fn note_change(&mut self, node: u32) {
        let list = if node < self.base { &mut self.dirty } else { &mut self.touched };
        if list.len() < TRACKED {
            list.push(node);
        } else {
            self.stale = true;
        }
    }

    fn root(&self) -> Option<u32> {
        self.slots.last().copied()
    }

    fn is_leaf(&self, node: u32) -> bool {
        self.nodes[node as usize].pair == NONE
    }

    fn weight_at(&self, slot: usize) -> &W {
        &self.nodes[self.slots[slot] as usize].weight
    }

    /// Number of leaves.
    pub fn leaf_count(&self) -> usize {
        self.slots.len().div_ceil(2)
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn contains(&self, symbol: u8) -> bool {
        self.leaf[usize::from(symbol)] != NONE
    }

    /// How many times an update fell back to a full rebuild.
    pub fn rebuild_count(&self) -> u64 {
        self.rebuilds
    }

    pub fn weight(&self, symbol: u8) -> Option<&W> {
        let q = self.leaf[usize::from(symbol)];
        (q != NONE).then(|| &self.nodes[q as usize].weight)
    }

    /// Weight of the root, which equals the sum of all leaf weights.
    pub fn total(&self) -> Option<&W> {
        self.root().map(|r| &self.nodes[r as usize].weight)
    }

    /// Codeword of `symbol`, root first. A lone leaf has the empty codeword.
    pub fn codeword(&self, symbol: u8) -> Result<Vec<bool>> {
        let mut q = self.leaf[usize::from(symbol)];
        if q == NONE {
            return Err(Error::UnknownSymbol(symbol));
        }
        let mut bits = Vec::new();
        while self.nodes[q as usize].parent != NONE {
            bits.push(self.nodes[q as usize].slot & 1 == 1);
            q = self.nodes[q as usize].parent;
        }
        bits.reverse();
        Ok(bits)
    }

    pub fn depth(&self, symbol: u8) -> Result<u32> {
        let mut q = self.leaf[usize::from(symbol)];
        if q == NONE {
            return Err(Error::UnknownSymbol(symbol));
        }
        let mut d = 0;
        while self.nodes[q as usize].parent != NONE {
            d += 1;
            q = self.nodes[q as usize].parent;
        }
        Ok(d)
    }

    /// `(symbol, codeword length)` for every leaf, ascending by symbol.
    pub fn code_lengths(&self) -> Vec<(u8, u32)> {
        (0..=255u8).filter(|&s| self.contains(s)).map(|s| (s, self.depth(s).expect("leaf"))).collect()
    }

    /// `(symbol, weight)` for every leaf, ascending by symbol.
    pub fn leaf_weights(&self) -> Vec<(u8, W)> {
        (0..=255u8).filter(|&s| self.contains(s)).map(|s| (s, self.weight(s).expect("leaf").clone())).collect()
    }

    /// Sum over leaves of weight times depth.
    pub fn weighted_cost(&self) -> BigUint {
        let mut cost = BigUint::default();
        for (s, d) in self.code_lengths() {
            cost += self.weight(s).expect("leaf").to_biguint() * d;
        }
        cost
    }

    pub fn encode_symbol(&self, symbol: u8, out: &mut BitStream) -> Result<()> {
        for bit in self.codeword(symbol)? {
            out.push(bit);
        }
        Ok(())
    }

    pub fn decode_symbol(&self, input: &mut BitReader<'_>) -> Result<u8> {
        let mut q = self.root().ok_or(Error::EmptyModel)?;
        while !self.is_leaf(q) {
            let pair = self.nodes[q as usize].pair as usize;
            let bit = usize::from(input.read_bit()?);
            q = self.slots[2 * pair + bit];
        }
        Ok(self.nodes[q as usize].symbol)
    }

    /// Applies a trajectory update to the leaf of `symbol`.
    pub fn apply(&mut self, symbol: u8, update: &Update<W>) -> Result<()> {
        match update {
            Update::None => Ok(()),
            Update::Increase(d) => self.increase(symbol, d),
            Update::Decrease(d) => self.decrease(symbol, d),
        }
    }

    /// Sets the weight of `symbol`; a weight of zero removes the leaf.
    pub fn change_weight(&mut self, symbol: u8, new_weight: &W) -> Result<()> {
        let current = self.weight(symbol).ok_or(Error::UnknownSymbol(symbol))?.clone();
        match new_weight.cmp(&current) {
            std::cmp::Ordering::Equal => Ok(()),
            std::cmp::Ordering::Greater => {
                let mut d = new_weight.clone();
                d.sub_assign_ref(&current);
                self.increase(symbol, &d)
            }
            std::cmp::Ordering::Less => {
                let mut d = current;
                d.sub_assign_ref(new_weight);
                self.decrease(symbol, &d)
            }
        }
    }

    fn is_ancestor(&self, anc: u32, mut q: u32) -> bool {
        while q != NONE {
            if q == anc {
                return true;
            }
            q = self.nodes[q as usize].parent;
        }
        false
    }

    fn related(&self, a: u32, b: u32) -> bool {
        self.is_ancestor(a, b) || self.is_ancestor(b, a)
    }

    fn swap(&mut self, a: u32, b: u32) {
        let (sa, sb) = (self.nodes[a as usize].slot, self.nodes[b as usize].slot);
        let (pa, pb) = (self.nodes[a as usize].parent, self.nodes[b as usize].parent);
        self.slots[sa as usize] = b;
        self.slots[sb as usize] = a;
        self.nodes[a as usize].slot = sb;
        self.nodes[b as usize].slot = sa;
        self.nodes[a as usize].parent = pb;
        self.nodes[b as usize].parent = pa;
    }

    fn pair_min(&self, pair: usize) -> &W {
        let lo = self.weight_at(2 * pair);
        match self.slots.get(2 * pair + 1) {
            Some(&r) => lo.min(&self.nodes[r as usize].weight),
            None => lo,
        }
    }

    fn pair_max(&self, pair: usize) -> &W {
        let lo = self.weight_at(2 * pair);
        match self.slots.get(2 * pair + 1) {
            Some(&r) => lo.max(&self.nodes[r as usize].weight),
            None => lo,
        }
    }

    /// Highest-slot node above `q`'s pair weighing the same as `q` and
    /// unrelated to it. Swapping within a pair would only relabel codewords.
    fn leader_up(&self, q: u32) -> u32 {
        let w = &self.nodes[q as usize].weight;
        let start = self.nodes[q as usize].slot as usize;
        let mut hi = start;
        let pairs = self.slots.len().div_ceil(2);
        let mut p = start / 2 + 1;
        while p < pairs && self.pair_min(p) <= w {
            hi = (2 * p + 1).min(self.slots.len() - 1);
            p += 1;
        }
        if start.is_multiple_of(2) && start + 1 < self.slots.len() {
            hi = hi.max(start + 1);
        }
        for t in (start + 1..=hi).rev() {
            let x = self.slots[t];
            if &self.nodes[x as usize].weight == w && !self.related(q, x) {
                return x;
            }
        }
        q
    }

    /// Lowest-slot node below `q` weighing the same as `q` and unrelated to
    /// it. Internal nodes skip their own pair partner.
    fn leader_down(&self, q: u32) -> u32 {
        let w = &self.nodes[q as usize].weight;
        let start = self.nodes[q as usize].slot as usize;
        // A leaf may also trade places with its lighter-slot partner.
        let own = if self.is_leaf(q) { start } else { start - start % 2 };
        let mut lo = start - start % 2;
        let mut p = start / 2;
        while p > 0 && self.pair_max(p - 1) >= w {
            lo = 2 * (p - 1);
            p -= 1;
        }
        for t in lo..own {
            let x = self.slots[t];
            if &self.nodes[x as usize].weight == w && !self.related(q, x) {
                return x;
            }
        }
        q
    }

    /// Adds `delta` to the weight of `symbol`.
    pub fn increase(&mut self, symbol: u8, delta: &W) -> Result<()> {
        let leaf = self.leaf[usize::from(symbol)];
        if leaf == NONE {
            return Err(Error::UnknownSymbol(symbol));
        }
        if delta.is_zero() {
            return Ok(());
        }
        let mut q = leaf;
        loop {
            let l = self.leader_up(q);
            if l != q {
                self.swap(q, l);
            }
            self.nodes[q as usize].weight.add_assign_ref(delta);
            self.note_change(q);
            let parent = self.nodes[q as usize].parent;
            if parent == NONE {
                break;
            }
            q = parent;
        }
        self.repair_from(leaf)
    }

    /// Subtracts `delta` from the weight of `symbol`, removing its leaf when
    /// the weight reaches zero.
    pub fn decrease(&mut self, symbol: u8, delta: &W) -> Result<()> {
        let leaf = self.leaf[usize::from(symbol)];
        if leaf == NONE || self.nodes[leaf as usize].weight < *delta {
            return Err(Error::WeightUnderflow { symbol });
        }
        if delta.is_zero() {
            return Ok(());
        }
        let mut q = leaf;
        loop {
            let l = self.leader_down(q);
            if l != q {
                self.swap(q, l);
            }
            self.nodes[q as usize].weight.sub_assign_ref(delta);
            self.note_change(q);
            let parent = self.nodes[q as usize].parent;
            if parent == NONE {
                break;
            }
            q = parent;
        }
        if self.nodes[leaf as usize].weight.is_zero() {
            if let Some(survivor) = self.remove_leaf(leaf) {
                return self.repair_from(survivor);
            }
            return Ok(());
        }
        self.repair_from(leaf)
    }

    /// Removes a zero-weight leaf; its sibling takes the parent's place.
    /// Returns the sibling, or `None` if the tree became empty.
    fn remove_leaf(&mut self, q: u32) -> Option<u32> {
        let symbol = self.nodes[q as usize].symbol;
        self.leaf[usize::from(symbol)] = NONE;
        self.stale = true;
        let p = self.nodes[q as usize].parent;
        if p == NONE {
            self.slots.clear();
            self.order.clear();
            return None;
        }
        let q_slot = self.nodes[q as usize].slot as usize;
        let s = self.slots[q_slot ^ 1];
        let p_slot = self.nodes[p as usize].slot;
        self.slots[p_slot as usize] = s;
        self.nodes[s as usize].slot = p_slot;
        self.nodes[s as usize].parent = self.nodes[p as usize].parent;
        let pair = q_slot / 2;
        self.slots.drain(2 * pair..2 * pair + 2);
        for t in 2 * pair..self.slots.len() {
            let x = self.slots[t] as usize;
            self.nodes[x].slot = t as u32;
        }
        for &x in &self.slots {
            let node = &mut self.nodes[x as usize];
            if node.pair != NONE && node.pair as usize > pair {
                node.pair -= 1;
            }
        }
        // Put the pair that received the sibling in weight order.
        let t = self.nodes[s as usize].slot as usize;
        if t + 1 < self.slots.len() {
            let (l, r) = (self.slots[t & !1], self.slots[t | 1]);
            if self.nodes[l as usize].weight > self.nodes[r as usize].weight {
                self.swap(l, r);
            }
        }
        Some(s)
    }

    /// Checks the ordering around every node on the path from `start` to the
    /// root and rebuilds the tree if it no longer holds.
    fn repair_from(&mut self, start: u32) -> Result<()> {
        let mut q = start;
        let mut ok = true;
        while q != NONE && ok {
            let pair = self.nodes[q as usize].slot as usize / 2;
            if pair > 0 && self.pair_max(pair - 1) > self.pair_min(pair) {
                ok = false;
            }
            if 2 * pair + 2 < self.slots.len() && self.pair_max(pair) > self.pair_min(pair + 1) {
                ok = false;
            }
            q = self.nodes[q as usize].parent;
        }
        if !ok {
            self.rebuild();
        }
        Ok(())
    }

    fn rebuild(&mut self) {
        self.rebuilds += 1;
        let k0 = if self.stale { self.resort_all() } else { self.resort_dirty() };
        self.construct_from(k0);
        #[cfg(test)]
        {
            let mut fresh = self.clone();
            fresh.resort_all();
            fresh.construct_from(0);
            assert_eq!(fresh.slots, self.slots, "resumed rebuild differs from a full one");
        }
    }

    fn resort_all(&mut self) -> usize {
        let (nodes, leaf) = (&self.nodes, &self.leaf);
        self.order.retain(|&x| leaf[usize::from(nodes[x as usize].symbol)] == x);
        self.order.sort_unstable_by(|&a, &b| merge_order(nodes, a, b));
        self.trace.clear();
        0
    }

    /// Moves the dirty leaves to their new places in `order` and returns the
    /// number of leading merges that are unaffected.
    fn resort_dirty(&mut self) -> usize {
        self.dirty.sort_unstable();
        self.dirty.dedup();
        let nodes = &self.nodes;
        let mut first = self.order.len();
        for &x in &self.dirty {
            let at = self.order.iter().position(|&y| y == x).expect("dirty leaf is live");
            first = first.min(at);
            self.order.remove(at);
        }
        for &x in &self.dirty {
            let at = self.order.partition_point(|&y| merge_order(nodes, y, x).is_lt());
            first = first.min(at);
            self.order.insert(at, x);
        }
        // Merge `k` only looks at leaves `consumed[k]` and `consumed[k] + 1`.
        let merges = self.order.len() - 1;
        self.consumed[..merges].partition_point(|&c| c as usize + 2 <= first)
    }

    /// Verifies the structural invariants: slot bookkeeping, parent links,
    /// internal sums, pair ordering and Kraft equality.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        self.check_structure()?;
        if self.leaf_count() >= 2 {
            // Kraft sum with denominator 2^max_depth.
            let lengths = self.code_lengths();
            let max = lengths.iter().map(|&(_, d)| d).max().unwrap();
            let sum: BigUint = lengths.iter().map(|&(_, d)| BigUint::from(1u8) << (max - d) as usize).sum();
            if sum != BigUint::from(1u8) << max as usize {
                return Err("Kraft sum differs from 1".into());
            }
        }
        Ok(())
    }

    /// The linear-time part of [`check_invariants`](Self::check_invariants).
    fn check_structure(&self) -> std::result::Result<(), String> {
        if self.slots.is_empty() {
            return Ok(());
        }
        if self.slots.len().is_multiple_of(2) {
            return Err("even slot count".into());
        }
        let root = *self.slots.last().unwrap();
        if self.nodes[root as usize].parent != NONE {
            return Err("root has a parent".into());
        }
        for (t, &x) in self.slots.iter().enumerate() {
            let node = &self.nodes[x as usize];
            if node.slot as usize != t {
                return Err(format!("slot mismatch at {t}"));
            }
            if node.pair == NONE {
                if self.leaf[usize::from(node.symbol)] != x {
                    return Err(format!("leaf map mismatch for {}", node.symbol));
                }
            } else {
                let (l, r) = (self.slots[2 * node.pair as usize], self.slots[2 * node.pair as usize + 1]);
                if self.nodes[l as usize].parent != x || self.nodes[r as usize].parent != x {
                    return Err(format!("broken parent link under slot {t}"));
                }
                let mut sum = self.nodes[l as usize].weight.clone();
                sum.add_assign_ref(&self.nodes[r as usize].weight);
                if sum != node.weight {
                    return Err(format!("internal sum mismatch at slot {t}"));
                }
            }
        }
        for p in 1..self.slots.len().div_ceil(2) {
            if self.pair_max(p - 1) > self.pair_min(p) {
                return Err(format!("pair order violated between pairs {} and {p}", p - 1));
            }
        }
        Ok(())
    }
}

/// Leaf order for merging: ascending weight, then descending symbol.
fn merge_order<W: Ord>(nodes: &[Node<W>], a: u32, b: u32) -> std::cmp::Ordering {
    let (na, nb) = (&nodes[a as usize], &nodes[b as usize]);
    na.weight.cmp(&nb.weight).then(nb.symbol.cmp(&na.symbol))
}

/// Encodes `text` with a dynamic Huffman code driven by `variant`.
pub fn huffman_encode(text: &[u8], variant: &Variant) -> Result<Encoded> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let class = variant.weight_class(text.len() as u64)?;
    with_weight_class!(class, W => encode_with::<W>(text, variant))
}

fn encode_with<W: WeightValue>(text: &[u8], variant: &Variant) -> Result<Encoded> {
    let mut traj = Trajectory::<W>::for_text(text, variant, Engine::Huffman)?;
    let header =
        ModelHeader::new(Engine::Huffman, variant.clone(), text.len() as u64, Alphabet::of_text(text), traj.table());
    let mut tree = HuffmanTree::build(traj.table())?;
    let mut payload = BitStream::new();
    for &s in text {
        if traj.needs_bits() {
            tree.encode_symbol(s, &mut payload)?;
        }
        let update = traj.advance(s)?;
        tree.apply(s, &update)?;
    }
    Ok(Encoded { header, payload })
}

/// Inverts [`huffman_encode`].
pub fn huffman_decode(header: &ModelHeader, payload: &BitStream) -> Result<Vec<u8>> {
    if header.engine != Engine::Huffman {
        return Err(Error::Unsupported(format!("{} header given to the Huffman decoder", header.engine)));
    }
    let class = header.variant.weight_class(header.n)?;
    with_weight_class!(class, W => decode_with::<W>(header, payload))
}

fn decode_with<W: WeightValue>(header: &ModelHeader, payload: &BitStream) -> Result<Vec<u8>> {
    let table: WeightTable<W> = table_from_parts(&header.variant, Engine::Huffman, &header.alphabet, &header.weights)?;
    let mut traj = Trajectory::new(&header.variant, header.n, table)?;
    let mut tree = HuffmanTree::build(traj.table())?;
    let mut reader = payload.reader();
    let mut text = Vec::with_capacity(header.n.min(1 << 24) as usize);
    while !traj.is_finished() {
        let s = if traj.needs_bits() {
            tree.decode_symbol(&mut reader)?
        } else {
            traj.table().sole_member().ok_or_else(|| Error::malformed("model emptied before the end of the text"))?
        };
        text.push(s);
        let update = traj.advance(s)?;
        tree.apply(s, &update)?;
    }
    if reader.remaining() != 0 {
        return Err(Error::malformed("unused payload bits"));
    }
    traj.check_drained()?;
    Ok(text)
}

/// Per-position codeword lengths of a Huffman run (zero where no bits are sent).
pub fn huffman_code_lengths(text: &[u8], variant: &Variant) -> Result<Vec<u32>> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let class = variant.weight_class(text.len() as u64)?;
    with_weight_class!(class, W => {
        let mut traj = Trajectory::<W>::for_text(text, variant, Engine::Huffman)?;
        let mut tree = HuffmanTree::build(traj.table())?;
        let mut lengths = Vec::with_capacity(text.len());
        for &s in text {
            lengths.push(if traj.needs_bits() { tree.depth(s)? } else { 0 });
            let update = traj.advance(s)?;
            tree.apply(s, &update)?;
        }
        Ok(lengths)
    })
}
