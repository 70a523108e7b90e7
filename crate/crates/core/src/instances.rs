//! Built-in game instances used by the shipped configs and tests.

use std::f64::consts::PI;

use crate::game::{ActionSet, BiAffinePayoff, Cell, GameInstance, Halfspace, ResponseFunction};
use crate::{Error, Result};

/// Names accepted by [`builtin`].
pub const BUILTINS: &[&str] = &["bilinear2", "anchored2", "fast1d", "tracking1d", "polygon16", "basis_sign8", "threshold1d", "affine1d"];

pub fn builtin(name: &str) -> Result<GameInstance> {
    match name {
        "bilinear2" => Ok(bilinear_2d()),
        "anchored2" => Ok(anchored_2d()),
        "fast1d" => Ok(fast_1d()),
        "tracking1d" => Ok(tracking_1d()),
        "polygon16" => Ok(polygon_16()),
        "threshold1d" => Ok(threshold_1d()),
        "affine1d" => Ok(affine_1d()),
        _ => {
            if let Some(d) = name.strip_prefix("basis_sign").and_then(|s| s.parse::<usize>().ok()) {
                if d > 0 {
                    return Ok(basis_sign(d));
                }
            }
            Err(Error::Config(format!("unknown builtin instance {name:?}")))
        }
    }
}

/// Unit disks for both players, `u = 0.9 (p1 l1, p2 l2)`, response
/// `(sign l1, sign l2) / sqrt 2`.
pub fn bilinear_2d() -> GameInstance {
    let c = vec![
        vec![vec![0.9, 0.0], vec![0.0, 0.0]],
        vec![vec![0.0, 0.0], vec![0.0, 0.9]],
    ];
    GameInstance::new(
        ActionSet::ball(2, 1.0),
        ActionSet::ball(2, 1.0),
        BiAffinePayoff::bilinear(c),
        ResponseFunction::Sign { scale: 1.0 / 2f64.sqrt() },
    )
    .expect("valid builtin")
}

/// Unit disks, `u_k = (p_k - 1/sqrt 2) l_k / 2` with the sign response. Every loss in
/// the open positive quadrant has the same ideal payoff `0`, which sits on the boundary
/// of what a fixed action can reach, so averages only get there by actually learning.
pub fn anchored_2d() -> GameInstance {
    let s = 0.5 / 2f64.sqrt();
    let mut pay = BiAffinePayoff::zeros(2, 2, 2);
    pay.c[0][0][0] = 0.5;
    pay.c[1][1][1] = 0.5;
    pay.b[0][0] = -s;
    pay.b[1][1] = -s;
    GameInstance::new(
        ActionSet::ball(2, 1.0),
        ActionSet::ball(2, 1.0),
        pay,
        ResponseFunction::Sign { scale: 1.0 / 2f64.sqrt() },
    )
    .expect("valid builtin")
}

/// `P = L = [-1, 1]`, `u = 0.3 (p - 1.5 l + 0.4, l)` with response `clip(1.5 l - 0.4)`.
/// The target set is a vertical segment, so the first coordinate measures tracking error.
pub fn tracking_1d() -> GameInstance {
    let mut pay = BiAffinePayoff::zeros(2, 1, 1);
    pay.u0[0] = 0.12;
    pay.a[0][0] = 0.3;
    pay.b[0][0] = -0.45;
    pay.b[1][0] = 0.3;
    GameInstance::new(
        ActionSet::cube(1, 1.0),
        ActionSet::cube(1, 1.0),
        pay,
        ResponseFunction::Affine {
            matrix: vec![vec![1.5]],
            offset: vec![-0.4],
        },
    )
    .expect("valid builtin")
}

/// `P = L = [-1, 1]`, `u = 0.7 (p l, (p + l) / 2)`, response `clip(1.5 l - 0.4)`.
pub fn fast_1d() -> GameInstance {
    let mut pay = BiAffinePayoff::zeros(2, 1, 1);
    pay.c[0][0][0] = 0.7;
    pay.a[1][0] = 0.35;
    pay.b[1][0] = 0.35;
    GameInstance::new(
        ActionSet::cube(1, 1.0),
        ActionSet::cube(1, 1.0),
        pay,
        ResponseFunction::Affine {
            matrix: vec![vec![1.5]],
            offset: vec![-0.4],
        },
    )
    .expect("valid builtin")
}

/// Vertices of the regular 16-gon with inradius 1.
pub fn polygon_16_vertices() -> Vec<Vec<f64>> {
    let r = 1.0 / (PI / 16.0).cos();
    (0..16)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / 16.0;
            vec![r * a.cos(), r * a.sin()]
        })
        .collect()
}

/// Scalar payoff `u = 0.5 p1 + 0.4 p2 l1` on the 16-gon against the unit disk; the
/// response picks the vertex at angle `pi/4` when `l1 >= 0` and `-pi/4` otherwise.
pub fn polygon_16() -> GameInstance {
    let verts = polygon_16_vertices();
    let mut pay = BiAffinePayoff::zeros(1, 2, 2);
    pay.a[0][0] = 0.5;
    pay.c[0][1][0] = 0.4;
    GameInstance::new(
        ActionSet::Polytope { vertices: verts.clone() },
        ActionSet::ball(2, 1.0),
        pay,
        ResponseFunction::PiecewiseConstant {
            cells: vec![
                Cell {
                    constraints: vec![Halfspace { normal: vec![-1.0, 0.0], offset: 0.0, strict: false }],
                    action: verts[2].clone(),
                },
                Cell { constraints: vec![], action: verts[14].clone() },
            ],
        },
    )
    .expect("valid builtin")
}

/// `P = [-1, 1]^d`, `L` the cross-polytope, `u = <p, l>`, response `sign(l)`.
pub fn basis_sign(d: usize) -> GameInstance {
    let mut verts = Vec::with_capacity(2 * d);
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            verts.push(e);
        }
    }
    let mut c = vec![vec![vec![0.0; d]; d]];
    for (i, row) in c[0].iter_mut().enumerate() {
        row[i] = 1.0;
    }
    GameInstance::new(
        ActionSet::cube(d, 1.0),
        ActionSet::Polytope { vertices: verts },
        BiAffinePayoff::bilinear(c),
        ResponseFunction::Sign { scale: 1.0 },
    )
    .expect("valid builtin")
}

/// `P = [-1, 1]`, `L = [-2, 2]`, `u = p l / 2`; response `-1` on `[-2, 1)` and `+1` on `[1, 2]`.
pub fn threshold_1d() -> GameInstance {
    GameInstance::new(
        ActionSet::cube(1, 1.0),
        ActionSet::cube(1, 2.0),
        BiAffinePayoff::bilinear(vec![vec![vec![0.5]]]),
        ResponseFunction::PiecewiseConstant {
            cells: vec![
                Cell {
                    constraints: vec![Halfspace { normal: vec![1.0], offset: 1.0, strict: true }],
                    action: vec![-1.0],
                },
                Cell {
                    constraints: vec![Halfspace { normal: vec![-1.0], offset: -1.0, strict: false }],
                    action: vec![1.0],
                },
            ],
        },
    )
    .expect("valid builtin")
}

/// `P = L = [-1, 1]`, scalar `u = 0.5 p + 0.4 l`, response `clip(1.5 l - 0.4)`.
///
/// Unlike [`threshold_1d`], the ideal payoff is not an extreme of what fixed actions
/// reach, so a target picked from one loss stays attainable against the others.
pub fn affine_1d() -> GameInstance {
    let mut pay = BiAffinePayoff::zeros(1, 1, 1);
    pay.a[0][0] = 0.5;
    pay.b[0][0] = 0.4;
    GameInstance::new(
        ActionSet::cube(1, 1.0),
        ActionSet::cube(1, 1.0),
        pay,
        ResponseFunction::Affine {
            matrix: vec![vec![1.5]],
            offset: vec![-0.4],
        },
    )
    .expect("valid builtin")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::validate_instance;

    #[test]
    fn builtins_validate() {
        for name in BUILTINS {
            let g = builtin(name).unwrap();
            let rep = validate_instance(&g, 2000, 1);
            assert!(rep.is_ok(), "{name}: {rep:?}");
        }
        assert!(builtin("nope").is_err());
        assert_eq!(builtin("basis_sign3").unwrap().d_p(), 3);
    }
}
