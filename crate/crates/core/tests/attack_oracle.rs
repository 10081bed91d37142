//! Replays both attack procedures step by step on top of the brute-force
//! oracle and checks that the library makes the same moves.

mod oracle;

use lamsab_core::attack::{attack_type1, attack_type2, AttackResult, AttackSpec, CriticalRule};
use lamsab_core::design::Design;
use lamsab_core::{Laminate, LoadCase, MaterialProperties};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const T: f64 = 0.125e-3;
const DESIGN_SF: f64 = 1.5;

#[derive(Debug, PartialEq)]
enum Outcome {
    Success,
    NoOp,
    Stuck,
}

struct Replay {
    original: Vec<f64>,
    deltas: Vec<f64>,
    current: f64,
    rule: CriticalRule,
}

impl Replay {
    fn new(original: &[f64], rule: CriticalRule) -> Self {
        let mut r = Self { original: original.to_vec(), deltas: vec![0.0; original.len()], current: 0.0, rule };
        r.current = r.force(&r.deltas.clone());
        r
    }

    fn srs(&self, deltas: &[f64]) -> Vec<f64> {
        let angles: Vec<f64> = self.original.iter().zip(deltas).map(|(a, d)| a + d).collect();
        let plies = oracle::plies_of(&angles, T);
        oracle::strength_ratios(&plies, &vec![true; plies.len()], [1.0, 0.0, 0.0], [0.0; 3]).unwrap()
    }

    fn force(&self, deltas: &[f64]) -> f64 {
        self.srs(deltas).into_iter().fold(f64::INFINITY, f64::min)
    }

    fn gated_out(&self, ply: usize) -> bool {
        if self.rule != CriticalRule::MinimumGroup {
            return false;
        }
        let sr = self.srs(&self.deltas);
        let min = sr.iter().copied().fold(f64::INFINITY, f64::min);
        sr[ply] > min * (1.0 + 1e-6)
    }

    fn probe(&self, ply: usize, delta: f64) -> f64 {
        let mut d = self.deltas.clone();
        d[ply] = delta;
        self.force(&d)
    }
}

fn middle_out(n: usize) -> Vec<usize> {
    let mut order = Vec::new();
    if n % 2 == 1 {
        order.push(n / 2);
    }
    let (mut lo, mut hi) = (n / 2, n.div_ceil(2));
    while lo > 0 {
        lo -= 1;
        order.push(lo);
        order.push(hi);
        hi += 1;
    }
    order
}

fn replay_type1(angles: &[f64], target_sf: f64, rule: CriticalRule) -> (Outcome, Vec<f64>) {
    let mut r = Replay::new(angles, rule);
    let target = r.current / DESIGN_SF * target_sf;
    if r.current <= target {
        return (Outcome::NoOp, r.deltas);
    }
    for _ in 0..90 {
        let mut rotated = false;
        for ply in middle_out(angles.len()) {
            if r.gated_out(ply) {
                continue;
            }
            let step = if angles[ply] < 0.0 { -1.0 } else { 1.0 };
            let delta = r.deltas[ply] + step;
            let f = r.probe(ply, delta);
            if rule == CriticalRule::ForceSensitive && f >= r.current {
                continue;
            }
            r.deltas[ply] = delta;
            r.current = f;
            rotated = true;
            if r.current <= target {
                return (Outcome::Success, r.deltas);
            }
        }
        if !rotated {
            return (Outcome::Stuck, r.deltas);
        }
    }
    (Outcome::Stuck, r.deltas)
}

/// Descend one ply from its current rotation; `true` if it moved.
fn descend(r: &mut Replay, ply: usize) -> bool {
    let base = r.deltas[ply];
    let dir = if r.probe(ply, base + 1.0) < r.current {
        1.0
    } else if r.probe(ply, base - 1.0) < r.current {
        -1.0
    } else {
        return false;
    };
    r.current = r.probe(ply, base + dir);
    r.deltas[ply] = base + dir;
    for _ in 1..179 {
        let f = r.probe(ply, r.deltas[ply] + dir);
        if f >= r.current {
            break;
        }
        r.deltas[ply] += dir;
        r.current = f;
    }
    true
}

fn replay_type2(angles: &[f64], target_sf: f64, rule: CriticalRule) -> (Outcome, Vec<f64>) {
    let mut r = Replay::new(angles, rule);
    let target = r.current / DESIGN_SF * target_sf;
    if r.current <= target {
        return (Outcome::NoOp, r.deltas);
    }
    let mut altered = Vec::new();
    for ply in middle_out(angles.len()) {
        if r.gated_out(ply) || !descend(&mut r, ply) {
            continue;
        }
        altered.push(ply);
        while altered.len() > 1 {
            let mut moved = false;
            for &q in &altered {
                moved |= descend(&mut r, q);
            }
            if !moved {
                break;
            }
        }
        if r.current <= target {
            return (Outcome::Success, r.deltas);
        }
    }
    (Outcome::Stuck, r.deltas)
}

fn library(result: Result<AttackResult, lamsab_core::attack::AttackError>) -> (bool, Vec<f64>) {
    match result {
        Ok(r) => (true, r.deltas),
        Err(e) => (false, e.best_found().expect("best state").deltas.clone()),
    }
}

fn check(angles: &[f64], target_sf: f64, rule: CriticalRule) {
    let lam = Laminate::uniform(MaterialProperties::graphite_epoxy(), angles, T).unwrap();
    let spec = AttackSpec { critical_rule: rule, ..AttackSpec::new(DESIGN_SF, target_sf, LoadCase::uniaxial_x(1.0)) };

    let (ok, deltas) = library(attack_type1(&lam, &spec));
    let (outcome, want) = replay_type1(angles, target_sf, rule);
    assert_eq!(deltas, want, "type 1 {rule:?} on {angles:?}");
    assert_eq!(ok, outcome != Outcome::Stuck, "type 1 {rule:?} on {angles:?}");

    let (ok, deltas) = library(attack_type2(&lam, &spec));
    let (outcome, want) = replay_type2(angles, target_sf, rule);
    assert_eq!(deltas, want, "type 2 {rule:?} on {angles:?}");
    assert_eq!(ok, outcome != Outcome::Stuck, "type 2 {rule:?} on {angles:?}");
}

#[test]
fn middle_out_order_reference() {
    assert_eq!(middle_out(4), vec![1, 2, 0, 3]);
    assert_eq!(middle_out(5), vec![2, 1, 3, 0, 4]);
    assert_eq!(lamsab_core::attack::middle_out_order(8), middle_out(8));
    assert_eq!(lamsab_core::attack::middle_out_order(9), middle_out(9));
}

#[test]
fn random_laminates_replay_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..12 {
        let n = rng.random_range(4..=12);
        let angles: Vec<f64> = (0..n).map(|_| 5.0 * rng.random_range(-17..=18) as f64).collect();
        let sf = [1.0, 0.9, 0.8][rng.random_range(0..3)];
        for rule in [CriticalRule::ForceSensitive, CriticalRule::MinimumGroup] {
            check(&angles, sf, rule);
        }
    }
}

#[test]
fn uniform_zero_stack_replays_identically() {
    for rule in [CriticalRule::ForceSensitive, CriticalRule::MinimumGroup] {
        check(&[0.0; 8], 1.0, rule);
    }
}

#[test]
fn bundled_design_replays_identically() {
    let d = Design::from_toml_str(include_str!("../../../data/representative_34ply.toml")).unwrap();
    let angles: Vec<f64> = d.layup.iter().map(|p| p.angle_deg).collect();
    check(&angles, 1.0, CriticalRule::ForceSensitive);
}
