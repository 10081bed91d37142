//! Brute-force reimplementation of the laminate analysis used as a test oracle.
//!
//! Written from the textbook formulas with no calls into the library beyond
//! reading the ply list: expanded trig forms of the transformed stiffness,
//! explicit stress rotation, hand-rolled Gaussian elimination.

#![allow(dead_code)]

pub struct OraclePly {
    pub angle: f64,
    pub thickness: f64,
    pub e1: f64,
    pub e2: f64,
    pub g12: f64,
    pub nu12: f64,
    pub xt: f64,
    pub xc: f64,
    pub yt: f64,
    pub yc: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRung {
    pub multiplier: f64,
    pub failed: Vec<usize>,
    pub flagged: bool,
}

fn cs(deg: f64) -> (f64, f64) {
    let r = deg.to_radians();
    (r.cos(), r.sin())
}

/// Transformed stiffness entries [Q11, Q12, Q16, Q22, Q26, Q66] in global axes.
pub fn qbar(p: &OraclePly) -> [f64; 6] {
    let nu21 = p.nu12 * p.e2 / p.e1;
    let den = 1.0 - p.nu12 * nu21;
    let q11 = p.e1 / den;
    let q12 = p.nu12 * p.e2 / den;
    let q22 = p.e2 / den;
    let q66 = p.g12;
    let (c, s) = cs(p.angle);
    let (c2, s2) = (c * c, s * s);
    let (c4, s4) = (c2 * c2, s2 * s2);
    [
        q11 * c4 + 2.0 * (q12 + 2.0 * q66) * s2 * c2 + q22 * s4,
        (q11 + q22 - 4.0 * q66) * s2 * c2 + q12 * (s4 + c4),
        (q11 - q12 - 2.0 * q66) * c2 * c * s - (q22 - q12 - 2.0 * q66) * c * s2 * s,
        q11 * s4 + 2.0 * (q12 + 2.0 * q66) * s2 * c2 + q22 * c4,
        (q11 - q12 - 2.0 * q66) * c * s2 * s - (q22 - q12 - 2.0 * q66) * c2 * c * s,
        (q11 + q22 - 2.0 * q12 - 2.0 * q66) * s2 * c2 + q66 * (s4 + c4),
    ]
}

fn as_matrix(q: &[f64; 6]) -> [[f64; 3]; 3] {
    [[q[0], q[1], q[2]], [q[1], q[3], q[4]], [q[2], q[4], q[5]]]
}

/// Solve a 6x6 system by Gaussian elimination with partial pivoting, after
/// symmetric diagonal scaling. `None` when a pivot vanishes relative to the
/// largest one.
pub fn solve6(m: [[f64; 6]; 6], rhs: [f64; 6]) -> Option<[f64; 6]> {
    let d: Vec<f64> = (0..6).map(|i| 1.0 / m[i][i].abs().sqrt()).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut a = [[0.0; 7]; 6];
    for i in 0..6 {
        for j in 0..6 {
            a[i][j] = m[i][j] * d[i] * d[j];
        }
        a[i][6] = rhs[i] * d[i];
    }
    let mut largest: f64 = 0.0;
    let mut smallest = f64::INFINITY;
    for col in 0..6 {
        let piv = (col..6).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        let p = a[col][col];
        largest = largest.max(p.abs());
        smallest = smallest.min(p.abs());
        if p == 0.0 {
            return None;
        }
        let pivot_row = a[col];
        for row in a.iter_mut().skip(col + 1) {
            let f = row[col] / p;
            for (x, y) in row.iter_mut().zip(pivot_row).skip(col) {
                *x -= f * y;
            }
        }
    }
    if smallest / largest < 1e-13 {
        return None;
    }
    let mut y = [0.0; 6];
    for i in (0..6).rev() {
        let mut acc = a[i][6];
        for j in i + 1..6 {
            acc -= a[i][j] * y[j];
        }
        y[i] = acc / a[i][i];
    }
    Some(std::array::from_fn(|i| y[i] * d[i]))
}

fn tsai_wu_sr(p: &OraclePly, s1: f64, s2: f64, t12: f64) -> f64 {
    let f1 = 1.0 / p.xt - 1.0 / p.xc;
    let f2 = 1.0 / p.yt - 1.0 / p.yc;
    let f11 = 1.0 / (p.xt * p.xc);
    let f22 = 1.0 / (p.yt * p.yc);
    let f66 = 1.0 / (p.s * p.s);
    let f12 = -0.5 * (f11 * f22).sqrt();
    let a = f1 * s1 + f2 * s2;
    let b = f11 * s1 * s1 + f22 * s2 * s2 + f66 * t12 * t12 + 2.0 * f12 * s1 * s2;
    if a == 0.0 && b == 0.0 {
        return f64::INFINITY;
    }
    if b == 0.0 {
        return 1.0 / a;
    }
    (-a + (a * a + 4.0 * b).sqrt()) / (2.0 * b)
}

/// Strength ratios of the active plies (infinite for inactive ones), or
/// `None` when the reduced laminate cannot be solved.
pub fn strength_ratios(plies: &[OraclePly], active: &[bool], n: [f64; 3], m: [f64; 3]) -> Option<Vec<f64>> {
    let h: f64 = plies.iter().map(|p| p.thickness).sum();
    let mut z = vec![-h / 2.0];
    for p in plies {
        z.push(z.last().unwrap() + p.thickness);
    }
    let qs: Vec<[[f64; 3]; 3]> = plies.iter().map(|p| as_matrix(&qbar(p))).collect();
    let mut abd = [[0.0; 6]; 6];
    for k in 0..plies.len() {
        if !active[k] {
            continue;
        }
        let (lo, hi) = (z[k], z[k + 1]);
        let w1 = hi - lo;
        let w2 = (hi * hi - lo * lo) / 2.0;
        let w3 = (hi * hi * hi - lo * lo * lo) / 3.0;
        for i in 0..3 {
            for j in 0..3 {
                let q = qs[k][i][j];
                abd[i][j] += q * w1;
                abd[i][j + 3] += q * w2;
                abd[i + 3][j] += q * w2;
                abd[i + 3][j + 3] += q * w3;
            }
        }
    }
    let x = solve6(abd, [n[0], n[1], n[2], m[0], m[1], m[2]])?;
    let mut out = Vec::with_capacity(plies.len());
    for k in 0..plies.len() {
        if !active[k] {
            out.push(f64::INFINITY);
            continue;
        }
        let zm = (z[k] + z[k + 1]) / 2.0;
        let e: [f64; 3] = std::array::from_fn(|i| x[i] + zm * x[i + 3]);
        let sg: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| qs[k][i][j] * e[j]).sum());
        let (c, s) = cs(plies[k].angle);
        let s1 = c * c * sg[0] + s * s * sg[1] + 2.0 * c * s * sg[2];
        let s2 = s * s * sg[0] + c * c * sg[1] - 2.0 * c * s * sg[2];
        let t12 = -c * s * sg[0] + c * s * sg[1] + (c * c - s * s) * sg[2];
        out.push(tsai_wu_sr(&plies[k], s1, s2, t12));
    }
    Some(out)
}

/// Knock out the weakest plies (ties within `tie` relative) until none is left.
pub fn ladder(plies: &[OraclePly], n: [f64; 3], m: [f64; 3], tie: f64) -> Vec<OracleRung> {
    let mut active = vec![true; plies.len()];
    let mut rungs: Vec<OracleRung> = Vec::new();
    while active.iter().any(|a| *a) {
        let sr = strength_ratios(plies, &active, n, m);
        let min = sr.as_ref().map(|v| v.iter().copied().fold(f64::INFINITY, f64::min));
        match (sr, min) {
            (Some(sr), Some(min)) if min.is_finite() => {
                let failed: Vec<usize> =
                    (0..plies.len()).filter(|&k| active[k] && sr[k] <= min * (1.0 + tie)).collect();
                for &k in &failed {
                    active[k] = false;
                }
                rungs.push(OracleRung { multiplier: min, failed, flagged: false });
            }
            _ => {
                let prev = rungs.last().expect("intact laminate must be solvable").multiplier;
                let failed = (0..plies.len()).filter(|&k| active[k]).collect();
                rungs.push(OracleRung { multiplier: prev, failed, flagged: true });
                break;
            }
        }
    }
    rungs
}

/// First-rung multiplier only.
pub fn first_multiplier(plies: &[OraclePly], n: [f64; 3], m: [f64; 3]) -> f64 {
    let sr = strength_ratios(plies, &vec![true; plies.len()], n, m).expect("solvable");
    sr.into_iter().fold(f64::INFINITY, f64::min)
}

pub fn graphite_epoxy_ply(angle: f64, thickness: f64) -> OraclePly {
    OraclePly {
        angle,
        thickness,
        e1: 181e9,
        e2: 10.3e9,
        g12: 7.17e9,
        nu12: 0.28,
        xt: 1500e6,
        xc: 1500e6,
        yt: 40e6,
        yc: 246e6,
        s: 68e6,
    }
}

pub fn plies_of(angles: &[f64], thickness: f64) -> Vec<OraclePly> {
    angles.iter().map(|&a| graphite_epoxy_ply(a, thickness)).collect()
}
