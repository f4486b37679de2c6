// SPDX-License-Identifier: Apache-2.0

//! Sum-of-minterms covers of the four dual-rail full-adder outputs.

/// A 3-literal product over one rail of each input: `a`, `b` and `cin` pick
/// rail 1 when true and rail 0 when false.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Minterm {
    pub a: bool,
    pub b: bool,
    pub cin: bool,
}

impl Minterm {
    pub const fn new(a: u8, b: u8, cin: u8) -> Minterm {
        Minterm {
            a: a == 1,
            b: b == 1,
            cin: cin == 1,
        }
    }

    /// All eight minterms, `A0B0CIN0` first.
    pub fn all() -> impl Iterator<Item = Minterm> {
        (0..8u8).map(|i| Minterm::new(i >> 2 & 1, i >> 1 & 1, i & 1))
    }

    /// Rail names of the three literals, e.g. `["A0", "B1", "CIN1"]`.
    pub fn literals(self) -> [String; 3] {
        let t = |b: bool| if b { 1 } else { 0 };
        [
            format!("A{}", t(self.a)),
            format!("B{}", t(self.b)),
            format!("CIN{}", t(self.cin)),
        ]
    }

    pub fn label(self) -> String {
        self.literals().concat()
    }
}

/// One output rail and the minterms that set it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub name: &'static str,
    pub minterms: [Minterm; 4],
}

/// SUM1, SUM0, COUT1, COUT0 in that order.
pub fn full_adder_covers() -> [Cover; 4] {
    use Minterm as M;
    [
        Cover {
            name: "SUM1",
            minterms: [M::new(0, 0, 1), M::new(0, 1, 0), M::new(1, 0, 0), M::new(1, 1, 1)],
        },
        Cover {
            name: "SUM0",
            minterms: [M::new(0, 0, 0), M::new(0, 1, 1), M::new(1, 0, 1), M::new(1, 1, 0)],
        },
        Cover {
            name: "COUT1",
            minterms: [M::new(0, 1, 1), M::new(1, 0, 1), M::new(1, 1, 0), M::new(1, 1, 1)],
        },
        Cover {
            name: "COUT0",
            minterms: [M::new(0, 0, 0), M::new(0, 0, 1), M::new(0, 1, 0), M::new(1, 0, 0)],
        },
    ]
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    #[test]
    fn covers_compute_sum_and_carry() {
        let covers = full_adder_covers();
        for m in Minterm::all() {
            let total = u8::from(m.a) + u8::from(m.b) + u8::from(m.cin);
            let sum = total & 1 == 1;
            let carry = total >= 2;
            let hit = |name: &str| {
                covers
                    .iter()
                    .find(|c| c.name == name)
                    .unwrap()
                    .minterms
                    .contains(&m)
            };
            assert_eq!((hit("SUM1"), hit("SUM0")), (sum, !sum), "{}", m.label());
            assert_eq!((hit("COUT1"), hit("COUT0")), (carry, !carry), "{}", m.label());
        }
    }

    #[test]
    fn union_is_all_eight_minterms() {
        let union: HashSet<Minterm> = full_adder_covers()
            .iter()
            .flat_map(|c| c.minterms)
            .collect();
        assert_eq!(union.len(), 8);
        assert_eq!(Minterm::new(0, 1, 1).label(), "A0B1CIN1");
    }
}
