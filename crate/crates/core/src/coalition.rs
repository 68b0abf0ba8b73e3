//! Coalitions as packed bitmasks over player indices.

use std::fmt;

const BITS: usize = 64;

/// Maximum supported player count for a single coalition.
pub const MAX_PLAYERS: usize = 4096;

/// A subset of the players `0..n`, stored as packed 64-bit blocks.
///
/// Membership tests, size and payoff dot products iterate set bits, so
/// coalitions stay cheap even at the thousand-player scale used for data
/// valuation games.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coalition {
    n: usize,
    blocks: Vec<u64>,
}

impl Coalition {
    /// The empty coalition over `n` players.
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_PLAYERS, "player count {n} exceeds {MAX_PLAYERS}");
        Coalition {
            n,
            blocks: vec![0; n.div_ceil(BITS)],
        }
    }

    /// The grand coalition `{0, .., n-1}`.
    pub fn grand(n: usize) -> Self {
        let mut c = Coalition::empty(n);
        for b in 0..c.blocks.len() {
            c.blocks[b] = u64::MAX;
        }
        c.mask_tail();
        c
    }

    /// Builds a coalition from explicit member indices.
    ///
    /// Panics if an index repeats or is out of `0..n`.
    pub fn from_members(n: usize, members: &[usize]) -> Self {
        let mut c = Coalition::empty(n);
        for &i in members {
            assert!(i < n, "player index {i} out of range 0..{n}");
            assert!(!c.contains(i), "duplicate player index {i}");
            c.insert(i);
        }
        c
    }

    /// Builds a coalition over `n <= 64` players from a bitmask.
    pub fn from_bits(n: usize, mask: u64) -> Self {
        assert!(n <= BITS);
        assert!(n == BITS || mask < (1u64 << n), "mask has bits above n");
        let mut c = Coalition::empty(n);
        if !c.blocks.is_empty() {
            c.blocks[0] = mask;
        }
        c
    }

    /// The bitmask of a coalition over `n <= 64` players.
    pub fn bits(&self) -> u64 {
        assert!(self.n <= BITS, "bitmask only defined for n <= 64");
        self.blocks.first().copied().unwrap_or(0)
    }

    pub fn player_count(&self) -> usize {
        self.n
    }

    /// Number of members.
    pub fn size(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn contains(&self, player: usize) -> bool {
        debug_assert!(player < self.n);
        self.blocks[player / BITS] >> (player % BITS) & 1 == 1
    }

    pub fn insert(&mut self, player: usize) {
        assert!(player < self.n);
        self.blocks[player / BITS] |= 1u64 << (player % BITS);
    }

    pub fn remove(&mut self, player: usize) {
        assert!(player < self.n);
        self.blocks[player / BITS] &= !(1u64 << (player % BITS));
    }

    /// The complement within `0..n`.
    pub fn complement(&self) -> Self {
        let mut c = Coalition {
            n: self.n,
            blocks: self.blocks.iter().map(|b| !b).collect(),
        };
        c.mask_tail();
        c
    }

    /// Iterates member indices in increasing order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut rest = block;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(bi * BITS + tz)
            })
        })
    }

    /// The payoff `p(C) = Σ_{i∈C} p_i` of the coalition under `p`.
    pub fn payoff(&self, p: &[f64]) -> f64 {
        debug_assert_eq!(p.len(), self.n);
        let mut total = 0.0;
        for (bi, &block) in self.blocks.iter().enumerate() {
            let mut rest = block;
            while rest != 0 {
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                total += p[bi * BITS + tz];
            }
        }
        total
    }

    /// True iff `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Coalition) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0)
    }

    /// True iff the two coalitions share a member.
    pub fn intersects(&self, other: &Coalition) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.blocks.iter().zip(&other.blocks).any(|(a, b)| a & b != 0)
    }

    /// Hex encoding of the membership mask (big-endian, no leading zeros).
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for &b in self.blocks.iter().rev() {
            if out.is_empty() {
                if b != 0 {
                    out = format!("{b:x}");
                }
            } else {
                out.push_str(&format!("{b:016x}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Parses the [`to_hex`](Self::to_hex) encoding back into a coalition.
    pub fn from_hex(n: usize, hex: &str) -> Option<Self> {
        let mut c = Coalition::empty(n);
        let digits: Vec<u32> = hex.chars().map(|ch| ch.to_digit(16)).collect::<Option<_>>()?;
        for (pos, &d) in digits.iter().rev().enumerate() {
            for bit in 0..4 {
                if d >> bit & 1 == 1 {
                    let idx = pos * 4 + bit;
                    if idx >= n {
                        return None;
                    }
                    c.insert(idx);
                }
            }
        }
        Some(c)
    }

    fn mask_tail(&mut self) {
        let used = self.n % BITS;
        if used != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grand_and_empty_sizes() {
        for n in [1, 5, 63, 64, 65, 130] {
            assert_eq!(Coalition::grand(n).size(), n);
            assert_eq!(Coalition::empty(n).size(), 0);
        }
    }

    #[test]
    fn complement_sizes_add_up() {
        let c = Coalition::from_members(70, &[0, 3, 64, 69]);
        assert_eq!(c.size() + c.complement().size(), 70);
        assert!(!c.complement().contains(64));
        assert!(c.complement().contains(1));
    }

    #[test]
    fn payoff_sums_member_entries() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let c = Coalition::from_members(4, &[1, 3]);
        assert!((c.payoff(&p) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn members_are_sorted() {
        let c = Coalition::from_members(100, &[99, 0, 65, 2]);
        let got: Vec<usize> = c.members().collect();
        assert_eq!(got, vec![0, 2, 65, 99]);
    }

    #[test]
    #[should_panic(expected = "duplicate")]
    fn duplicate_member_panics() {
        Coalition::from_members(3, &[1, 1]);
    }

    #[test]
    fn hex_round_trip() {
        for members in [vec![], vec![0], vec![0, 67, 199], vec![5, 6, 7]] {
            let c = Coalition::from_members(200, &members);
            let back = Coalition::from_hex(200, &c.to_hex()).unwrap();
            assert_eq!(c, back);
        }
    }

    #[test]
    fn subset_and_intersection() {
        let a = Coalition::from_members(10, &[1, 2]);
        let b = Coalition::from_members(10, &[1, 2, 4]);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert!(a.intersects(&b));
        assert!(!a.intersects(&Coalition::from_members(10, &[0, 9])));
    }
}
