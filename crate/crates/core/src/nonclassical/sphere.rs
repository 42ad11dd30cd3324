//! Global maximization of a smooth function on the unit sphere: a
//! deterministic Fibonacci lattice (plus both poles) seeds Nelder-Mead
//! searches in `(theta, phi)`.

use crate::angular::{fibonacci_lattice, Direction};

#[derive(Debug, Clone)]
pub struct SphereSearch {
    pub lattice_size: usize,
    /// Number of best lattice nodes refined locally.
    pub refine_starts: usize,
    pub initial_step: f64,
    /// Simplex diameter (radians) below which refinement stops.
    pub x_tolerance: f64,
    /// Spread of function values below which refinement stops.
    pub f_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SphereSearch {
    fn default() -> Self {
        Self {
            lattice_size: 512,
            refine_starts: 6,
            initial_step: 0.05,
            x_tolerance: 1e-10,
            f_tolerance: 1e-14,
            max_iterations: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMaximum {
    pub value: f64,
    pub direction: Direction,
}

pub fn maximize_on_sphere(f: impl Fn(Direction) -> f64, search: &SphereSearch) -> SphereMaximum {
    let mut nodes = vec![Direction::north(), Direction::south()];
    nodes.extend(fibonacci_lattice(search.lattice_size));
    let mut scored: Vec<(f64, Direction)> = nodes.into_iter().map(|n| (f(n), n)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best = SphereMaximum {
        value: scored[0].0,
        direction: scored[0].1,
    };
    for &(_, start) in scored.iter().take(search.refine_starts.max(1)) {
        let local = nelder_mead(&f, start, search);
        if local.value > best.value {
            best = local;
        }
    }
    best
}

fn nelder_mead(f: &impl Fn(Direction) -> f64, start: Direction, s: &SphereSearch) -> SphereMaximum {
    // minimize g = -f over (theta, phi); from_angles keeps every point valid
    let g = |p: [f64; 2]| -f(Direction::from_angles(p[0], p[1]));
    let x0 = [start.theta(), start.phi()];
    let mut simplex = [
        x0,
        [x0[0] + s.initial_step, x0[1]],
        [x0[0], x0[1] + s.initial_step],
    ];
    let mut values = simplex.map(g);

    for _ in 0..s.max_iterations {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let diameter = (1..3)
            .map(|i| {
                let dx = simplex[i][0] - simplex[0][0];
                let dy = simplex[i][1] - simplex[0][1];
                (dx * dx + dy * dy).sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < s.x_tolerance || (values[2] - values[0]).abs() < s.f_tolerance && diameter < 1e-6 {
            break;
        }

        let centroid = [
            (simplex[0][0] + simplex[1][0]) / 2.0,
            (simplex[0][1] + simplex[1][1]) / 2.0,
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let reflected = along(-1.0);
        let fr = g(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = g(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = g(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                // shrink towards the best vertex
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    values[i] = g(simplex[i]);
                }
            }
        }
    }
    let (idx, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("simplex has three vertices");
    SphereMaximum {
        value: -values[idx],
        direction: Direction::from_angles(simplex[idx][0], simplex[idx][1]),
    }
}
