#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use portham_core::bcs::{assemble_extended, Layout, PortSystem};
use portham_core::dirac::GramSpace;
use portham_core::discretization::{
    build_beam_1d, build_elasticity_2d, build_maxwell_3d, build_wave, CoefficientField, GridSpec, Lame,
};
use portham_core::physics::{build_constitutive, close_ports, ClosedSystem, PhysicsKind};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fields(label: &str) -> Vec<CoefficientField> {
    let u = CoefficientField::uniform;
    match label {
        "wave1d" | "wave2d" => vec![u("rho", 1.0), u("T", 1.0)],
        "elasticity2d" => vec![u("rho", 1.0), u("lambda", 1.0), u("mu", 1.0)],
        "beam1d" => vec![u("mu", 1.0), u("bending", 1.0)],
        "maxwell3d" => vec![u("eps", 1.0), u("mu_mag", 1.0)],
        _ => panic!("unknown label {label}"),
    }
}

pub fn build(label: &str, cells: &[usize]) -> PortSystem {
    let grid = GridSpec::unit(cells).unwrap();
    let f = fields(label);
    match label {
        "wave1d" | "wave2d" => build_wave(&grid, &f[0], &f[1]),
        "elasticity2d" => build_elasticity_2d(&grid, &f[0], &Lame::uniform(1.0, 1.0)),
        "beam1d" => build_beam_1d(&grid, &f[0], &f[1]),
        "maxwell3d" => build_maxwell_3d(&grid, &f[0], &f[1], None),
        _ => panic!("unknown label {label}"),
    }
    .unwrap()
}

pub fn maxwell(cells: &[usize], eta_inv: f64) -> (PortSystem, ClosedSystem) {
    let grid = GridSpec::unit(cells).unwrap();
    let mut f = fields("maxwell3d");
    f.push(CoefficientField::uniform("eta_inv", eta_inv));
    let sys = build_maxwell_3d(&grid, &f[0], &f[1], Some(&f[2])).unwrap();
    let law = build_constitutive(PhysicsKind::Maxwell, &sys, &f).unwrap();
    let closed = close_ports(&assemble_extended(&sys).unwrap(), &law).unwrap();
    (sys, closed)
}

pub fn closed(label: &str, cells: &[usize]) -> (PortSystem, ClosedSystem) {
    let sys = build(label, cells);
    let law = build_constitutive(PhysicsKind::from_label(label).unwrap(), &sys, &fields(label)).unwrap();
    let closed = close_ports(&assemble_extended(&sys).unwrap(), &law).unwrap();
    (sys, closed)
}

/// Small representative grid per builder.
pub fn small_cases() -> Vec<(&'static str, Vec<usize>)> {
    vec![
        ("wave1d", vec![8]),
        ("wave2d", vec![3, 4]),
        ("elasticity2d", vec![3, 3]),
        ("beam1d", vec![6]),
        ("maxwell3d", vec![2, 2, 2]),
    ]
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_diagonal_gram(rng: &mut ChaCha8Rng, n: usize) -> GramSpace {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    GramSpace::diagonal(&w).unwrap()
}

pub fn random_spd_gram(rng: &mut ChaCha8Rng, n: usize) -> GramSpace {
    let a = random_matrix(rng, n, n);
    let g = &a * a.transpose() + DMatrix::identity(n, n) * (n as f64);
    let g = (&g + g.transpose()) * 0.5;
    GramSpace::new(g).unwrap()
}

/// `J` with `W·J` skew for the Gram `W`: `J = W⁻¹·S`, `S` skew.
pub fn random_gram_skew(rng: &mut ChaCha8Rng, w: &GramSpace) -> DMatrix<f64> {
    let n = w.dim();
    let a = random_matrix(rng, n, n);
    let s = &a - a.transpose();
    w.gram().clone().cholesky().unwrap().solve(&s)
}

/// Random system satisfying the Green identity by construction: `L`, the
/// traces and observations are random, `K` solves the identity.
pub fn random_admissible(rng: &mut ChaCha8Rng, dims: [usize; 4]) -> PortSystem {
    let [n1, n2, u1, u2] = dims;
    let x1 = random_diagonal_gram(rng, n1);
    let x2 = random_diagonal_gram(rng, n2);
    let gu1 = if u1 == 0 { GramSpace::trivial() } else { random_diagonal_gram(rng, u1) };
    let gu2 = if u2 == 0 { GramSpace::trivial() } else { random_diagonal_gram(rng, u2) };
    let l = random_matrix(rng, n2, n1);
    let gamma1 = random_matrix(rng, u1, n1);
    let gamma2 = random_matrix(rng, u2, n2);
    let beta1 = random_matrix(rng, u2, n1);
    let beta2 = random_matrix(rng, u1, n2);
    let rhs = l.transpose() * x2.gram()
        - gamma1.transpose() * gu1.gram() * &beta2
        - beta1.transpose() * gu2.gram() * &gamma2;
    let k = x1.gram().clone().cholesky().unwrap().solve(&rhs);
    PortSystem {
        label: "random".into(),
        x1,
        x2,
        u1: gu1,
        u2: gu2,
        l,
        k,
        gamma1,
        gamma2,
        beta1,
        beta2,
        x1_layout: Layout::single("a", n1),
        x2_layout: Layout::single("b", n2),
    }
}
