//! Splitting bipartite components between the center side and the leaf side
//! of a star.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacancies on the two sides of a star with `h` leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarVacancy {
    pub a: usize,
    pub b: usize,
    pub h: usize,
}

/// Where a component's larger class goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    LargerToCenter,
    LargerToLeaves,
}

/// Running state of the distribution rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distributor {
    pub vacancy: StarVacancy,
    /// False once some step ended with more center vacancies than leaf
    /// vacancies.
    pub a_never_exceeded_b: bool,
}

impl Distributor {
    pub fn new(vacancy: StarVacancy) -> Self {
        Distributor {
            vacancy,
            a_never_exceeded_b: vacancy.a <= vacancy.b,
        }
    }

    /// The side the rule picks for the next component, regardless of fit.
    pub fn rule(&self) -> Side {
        let v = self.vacancy;
        if v.h * v.a > v.b {
            Side::LargerToCenter
        } else {
            Side::LargerToLeaves
        }
    }

    /// Places a component with classes of sizes `larger >= smaller` on the
    /// side chosen by the rule, or returns `None` (state unchanged) if that
    /// side lacks room.
    pub fn place(&mut self, larger: usize, smaller: usize) -> Option<Side> {
        let side = self.rule();
        let (to_a, to_b) = match side {
            Side::LargerToCenter => (larger, smaller),
            Side::LargerToLeaves => (smaller, larger),
        };
        if to_a > self.vacancy.a || to_b > self.vacancy.b {
            return None;
        }
        self.vacancy.a -= to_a;
        self.vacancy.b -= to_b;
        if self.vacancy.a > self.vacancy.b {
            self.a_never_exceeded_b = false;
        }
        Some(side)
    }
}

/// Outcome of distributing a whole list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    pub sides: Vec<Side>,
    /// Vacancies after each step.
    pub trace: Vec<(usize, usize)>,
    pub a_never_exceeded_b: bool,
}

/// Volume the rule is guaranteed to place: `a + b - 4(2q+1)D^2`.
pub fn guaranteed_volume(a: usize, b: usize, max_degree: usize, q: usize) -> usize {
    (a + b).saturating_sub(4 * (2 * q + 1) * max_degree * max_degree)
}

/// Runs the rule over `classes` (each `(larger, smaller)`) in order.
/// Fails with `Infeasible` at the first component that does not fit.
pub fn distribute_components(classes: &[(usize, usize)], star: StarVacancy) -> Result<Distribution> {
    let mut dist = Distributor::new(star);
    let mut sides = Vec::with_capacity(classes.len());
    let mut trace = Vec::with_capacity(classes.len());
    for (k, &(x, y)) in classes.iter().enumerate() {
        let (larger, smaller) = (x.max(y), x.min(y));
        let Some(side) = dist.place(larger, smaller) else {
            return Err(Error::Infeasible {
                component: k,
                a: dist.vacancy.a,
                b: dist.vacancy.b,
            });
        };
        sides.push(side);
        trace.push((dist.vacancy.a, dist.vacancy.b));
    }
    Ok(Distribution {
        sides,
        trace,
        a_never_exceeded_b: dist.a_never_exceeded_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_list_is_a_no_op() {
        let star = StarVacancy { a: 7, b: 14, h: 2 };
        let d = distribute_components(&[], star).unwrap();
        assert!(d.sides.is_empty() && d.trace.is_empty());
    }

    #[test]
    fn five_edges_into_ten_by_ten() {
        let star = StarVacancy { a: 10, b: 10, h: 1 };
        let d = distribute_components(&[(1, 1); 5], star).unwrap();
        assert_eq!(d.sides.len(), 5);
        assert_eq!(d.trace.last(), Some(&(5, 5)));
    }

    #[test]
    fn rule_follows_the_sign_of_ha_minus_b() {
        let d = Distributor::new(StarVacancy { a: 5, b: 9, h: 2 });
        assert_eq!(d.rule(), Side::LargerToCenter);
        let d = Distributor::new(StarVacancy { a: 5, b: 10, h: 2 });
        assert_eq!(d.rule(), Side::LargerToLeaves);
    }

    #[test]
    fn balanced_start_with_unbalanced_component_breaks_the_running_order() {
        // h = 1 and a = b: the rule sends the larger class to the leaves.
        let d = distribute_components(&[(3, 1)], StarVacancy { a: 10, b: 10, h: 1 }).unwrap();
        assert_eq!(d.sides, vec![Side::LargerToLeaves]);
        assert_eq!(d.trace, vec![(9, 7)]);
        assert!(!d.a_never_exceeded_b);
    }

    #[test]
    fn overflow_is_infeasible() {
        let err = distribute_components(&[(4, 4), (4, 4)], StarVacancy { a: 6, b: 6, h: 1 });
        assert!(matches!(err, Err(Error::Infeasible { component: 1, .. })));
    }

    #[test]
    fn guaranteed_volume_formula() {
        assert_eq!(guaranteed_volume(64, 64, 2, 2), 128 - 80);
        assert_eq!(guaranteed_volume(3, 3, 2, 2), 0);
    }
}
