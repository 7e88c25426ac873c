use super::{GraphError, Result};

/// The two vertex-count bounds used when reasoning about graph capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Connected undirected graph with maximum degree `d` and longest path `k`.
    Moore { d: u64, k: u64 },
    /// Polypath with at most `m` sinks, `m + 1` sources and directed paths of
    /// length at most `k`.
    Polypath { m: u64, k: u64 },
}

impl Bound {
    pub fn eval(self) -> Result<u64> {
        match self {
            Bound::Moore { d, k } => moore_bound(d, k),
            Bound::Polypath { m, k } => polypath_bound(m, k),
        }
    }
}

fn overflow() -> GraphError {
    GraphError::BadParameter("bound overflows u64".into())
}

/// `1 + d * sum_{i<k} (d-1)^i`.
pub fn moore_bound(d: u64, k: u64) -> Result<u64> {
    if d == 0 {
        return Ok(1);
    }
    let mut sum: u64 = 0;
    let mut term: u64 = 1;
    for i in 0..k {
        if i > 0 {
            term = term.checked_mul(d - 1).ok_or_else(overflow)?;
        }
        sum = sum.checked_add(term).ok_or_else(overflow)?;
        if term == 0 {
            break;
        }
    }
    d.checked_mul(sum)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(overflow)
}

/// `2mk + 1`.
pub fn polypath_bound(m: u64, k: u64) -> Result<u64> {
    m.checked_mul(k)
        .and_then(|x| x.checked_mul(2))
        .and_then(|x| x.checked_add(1))
        .ok_or_else(overflow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(moore_bound(2, 2).unwrap(), 5);
        assert_eq!(moore_bound(0, 5).unwrap(), 1);
        assert_eq!(moore_bound(1, 1).unwrap(), 2);
        assert_eq!(moore_bound(1, 7).unwrap(), 2);
        assert_eq!(moore_bound(3, 2).unwrap(), 10);
        assert_eq!(moore_bound(5, 0).unwrap(), 1);
        assert_eq!(polypath_bound(1, 1).unwrap(), 3);
        assert_eq!(polypath_bound(2, 3).unwrap(), 13);
        assert!(moore_bound(u64::MAX, 3).is_err());
        assert_eq!(Bound::Moore { d: 2, k: 2 }.eval().unwrap(), 5);
    }
}
