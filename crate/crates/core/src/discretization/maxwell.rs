use nalgebra::DMatrix;

use super::stencil::{Axis, BOUNDARY_WEIGHT_FRACTION};
use super::{CoefficientField, GridSpec};
use crate::bcs::{Layout, PortSystem};
use crate::dirac::GramSpace;
use crate::error::Result;

/// Row-major index over a 3D box of extents `ext`.
#[derive(Debug, Clone, Copy)]
struct Block {
    ext: [usize; 3],
    offset: usize,
}

impl Block {
    fn len(&self) -> usize {
        self.ext.iter().product()
    }

    fn at(&self, p: [usize; 3]) -> usize {
        self.offset + (p[0] * self.ext[1] + p[1]) * self.ext[2] + p[2]
    }

    fn points(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let [a, b, c] = self.ext;
        (0..a).flat_map(move |i| (0..b).flat_map(move |j| (0..c).map(move |k| [i, j, k])))
    }
}

fn cyclic(a: usize) -> (usize, usize) {
    ((a + 1) % 3, (a + 2) % 3)
}

/// Tangential magnetic degree of freedom on a boundary plane, attached to a
/// boundary edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryH {
    /// Global edge index.
    pub edge: usize,
    /// Normal axis of the boundary plane.
    pub plane: usize,
    /// `+1` on the upper plane, `−1` on the lower one.
    pub side: f64,
    /// Component of `H` stored.
    pub component: usize,
}

/// Index structure of the Yee layout on a grid.
#[derive(Debug, Clone)]
pub struct MaxwellLayout {
    axes: [Axis; 3],
    edges: [Block; 3],
    faces: [Block; 3],
    nodes: Block,
    cells: Block,
    pub boundary_h: Vec<BoundaryH>,
}

impl MaxwellLayout {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        grid.require_dimension(&[3], "maxwell")?;
        let axes = [grid.axis(0), grid.axis(1), grid.axis(2)];
        let n = [axes[0].cells, axes[1].cells, axes[2].cells];
        let mut off = 0;
        let edges = [0, 1, 2].map(|a| {
            let mut ext = [n[0] + 1, n[1] + 1, n[2] + 1];
            ext[a] = n[a];
            let b = Block { ext, offset: off };
            off += b.len();
            b
        });
        off = 0;
        let faces = [0, 1, 2].map(|a| {
            let mut ext = n;
            ext[a] = n[a] + 1;
            let b = Block { ext, offset: off };
            off += b.len();
            b
        });
        let nodes = Block {
            ext: [n[0] + 1, n[1] + 1, n[2] + 1],
            offset: 0,
        };
        let cells = Block { ext: n, offset: 0 };
        let mut boundary_h = Vec::new();
        for (a, block) in edges.iter().enumerate() {
            let (b, c) = cyclic(a);
            for p in block.points() {
                for (plane, component) in [(b, c), (c, b)] {
                    for (pos, side) in [(0, -1.0), (n[plane], 1.0)] {
                        if p[plane] == pos {
                            boundary_h.push(BoundaryH {
                                edge: block.at(p),
                                plane,
                                side,
                                component,
                            });
                        }
                    }
                }
            }
        }
        Ok(Self {
            axes,
            edges,
            faces,
            nodes,
            cells,
            boundary_h,
        })
    }

    pub fn n_edges(&self) -> usize {
        self.edges.iter().map(Block::len).sum()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.iter().map(Block::len).sum()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    fn h(&self, a: usize) -> f64 {
        self.axes[a].h
    }

    /// `½` at a boundary node position, `1` inside.
    fn clip(&self, axis: usize, node: usize) -> f64 {
        if node == 0 || node == self.axes[axis].cells {
            0.5
        } else {
            1.0
        }
    }

    /// Edge length times clipped dual-face area.
    pub fn edge_weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.n_edges());
        for (a, block) in self.edges.iter().enumerate() {
            let (b, c) = cyclic(a);
            for p in block.points() {
                w.push(self.h(a) * self.h(b) * self.clip(b, p[b]) * self.h(c) * self.clip(c, p[c]));
            }
        }
        w
    }

    /// Face area times clipped dual-edge length.
    pub fn face_weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.n_faces());
        for (a, block) in self.faces.iter().enumerate() {
            let (b, c) = cyclic(a);
            for p in block.points() {
                w.push(self.h(b) * self.h(c) * self.h(a) * self.clip(a, p[a]));
            }
        }
        w
    }

    fn edge_point(&self, edge: usize) -> (usize, [usize; 3]) {
        for (a, block) in self.edges.iter().enumerate() {
            if edge < block.offset + block.len() {
                let mut r = edge - block.offset;
                let k = r % block.ext[2];
                r /= block.ext[2];
                return (a, [r / block.ext[1], r % block.ext[1], k]);
            }
        }
        unreachable!("edge index out of range")
    }

    /// Edge length times the clipped length of the other tangential direction
    /// in the boundary plane.
    pub fn boundary_weight(&self, d: &BoundaryH) -> f64 {
        let (a, p) = self.edge_point(d.edge);
        let other = 3 - a - d.plane;
        self.h(a) * self.h(other) * self.clip(other, p[other])
    }

    /// `(n ∧ H)·t` read-off sign of a boundary dof.
    pub fn boundary_sign(&self, d: &BoundaryH) -> f64 {
        let (a, _) = self.edge_point(d.edge);
        let (b, _) = cyclic(a);
        if d.plane == b {
            d.side
        } else {
            -d.side
        }
    }

    /// Nodes → edges.
    pub fn gradient(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.n_edges(), self.n_nodes());
        for (a, block) in self.edges.iter().enumerate() {
            for p in block.points() {
                let mut q = p;
                q[a] += 1;
                let r = block.at(p);
                g[(r, self.nodes.at(p))] = -1.0 / self.h(a);
                g[(r, self.nodes.at(q))] = 1.0 / self.h(a);
            }
        }
        g
    }

    /// Edges → faces, `(curl E)_a = ∂_b E_c − ∂_c E_b`.
    pub fn curl(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_faces(), self.n_edges());
        for (a, block) in self.faces.iter().enumerate() {
            let (b, c) = cyclic(a);
            for p in block.points() {
                let r = block.at(p);
                let mut pb = p;
                pb[b] += 1;
                m[(r, self.edges[c].at(p))] -= 1.0 / self.h(b);
                m[(r, self.edges[c].at(pb))] += 1.0 / self.h(b);
                let mut pc = p;
                pc[c] += 1;
                m[(r, self.edges[b].at(p))] += 1.0 / self.h(c);
                m[(r, self.edges[b].at(pc))] -= 1.0 / self.h(c);
            }
        }
        m
    }

    /// Faces → cells.
    pub fn divergence(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n_cells(), self.n_faces());
        for p in self.cells.points() {
            let r = self.cells.at(p);
            for a in 0..3 {
                let mut q = p;
                q[a] += 1;
                d[(r, self.faces[a].at(p))] = -1.0 / self.h(a);
                d[(r, self.faces[a].at(q))] = 1.0 / self.h(a);
            }
        }
        d
    }

    /// Dual curl from faces and boundary dofs to edges, built on the clipped
    /// dual cells: half-cell differences against the boundary values.
    fn dual_curl(&self) -> DMatrix<f64> {
        let nf = self.n_faces();
        let mut m = DMatrix::zeros(self.n_edges(), nf + self.boundary_h.len());
        let hb_col = |edge: usize, plane: usize| {
            self.boundary_h
                .iter()
                .position(|d| d.edge == edge && d.plane == plane)
                .map(|i| nf + i)
                .expect("boundary dof exists for every boundary edge and plane")
        };
        for (a, block) in self.edges.iter().enumerate() {
            let (b, c) = cyclic(a);
            for p in block.points() {
                let r = block.at(p);
                // +∂_b H_c, then −∂_c H_b
                for (dir, comp, sign) in [(b, c, 1.0), (c, b, -1.0)] {
                    let n = self.axes[dir].cells;
                    let h = self.h(dir);
                    let face = &self.faces[comp];
                    let mut lo = p;
                    if p[dir] == 0 {
                        m[(r, face.at(p))] += sign * 2.0 / h;
                        m[(r, hb_col(r, dir))] -= sign * 2.0 / h;
                    } else if p[dir] == n {
                        lo[dir] -= 1;
                        m[(r, hb_col(r, dir))] += sign * 2.0 / h;
                        m[(r, face.at(lo))] -= sign * 2.0 / h;
                    } else {
                        lo[dir] -= 1;
                        m[(r, face.at(p))] += sign / h;
                        m[(r, face.at(lo))] -= sign / h;
                    }
                }
            }
        }
        m
    }
}

/// Maxwell's equations on a Yee grid with a resistive current port.
///
/// `X¹` holds `E` on primal edges. `X²` holds `H` on primal faces, the
/// tangential boundary values of `H` (one per boundary edge and boundary
/// plane), and the current port on the edges. `L = [−curl; 0; I]`,
/// `K = [−curl*, I]`. `U²` carries the twisted tangential trace of `H`, `β¹`
/// reads the tangential `E` on the same boundary edges.
pub fn build_maxwell_3d(
    grid: &GridSpec,
    eps: &CoefficientField,
    mu_mag: &CoefficientField,
    eta_inv: Option<&CoefficientField>,
) -> Result<PortSystem> {
    let lay = MaxwellLayout::new(grid)?;
    eps.validate_positive()?;
    mu_mag.validate_positive()?;
    let (ne, nf, nb) = (lay.n_edges(), lay.n_faces(), lay.boundary_h.len());
    eps.expand(ne)?;
    mu_mag.expand(nf + nb)?;
    if let Some(eta) = eta_inv {
        eta.validate_nonnegative()?;
        eta.expand(ne)?;
    }
    let n2 = nf + nb + ne;

    let curl = lay.curl();
    let mut l = DMatrix::zeros(n2, ne);
    l.view_mut((0, 0), (nf, ne)).copy_from(&(-&curl));
    l.view_mut((nf + nb, 0), (ne, ne)).fill_with_identity();
    let mut k = DMatrix::zeros(ne, n2);
    k.view_mut((0, 0), (ne, nf + nb)).copy_from(&(-lay.dual_curl()));
    k.view_mut((0, nf + nb), (ne, ne)).fill_with_identity();

    let mut beta1 = DMatrix::zeros(nb, ne);
    let mut gamma2 = DMatrix::zeros(nb, n2);
    let mut n_weights = Vec::with_capacity(nb);
    let mut hb_weights = Vec::with_capacity(nb);
    for (i, d) in lay.boundary_h.iter().enumerate() {
        beta1[(i, d.edge)] = 1.0;
        gamma2[(i, nf + i)] = lay.boundary_sign(d);
        let w = lay.boundary_weight(d);
        n_weights.push(w);
        hb_weights.push(w * BOUNDARY_WEIGHT_FRACTION * lay.h(d.plane));
    }

    let e_weights = lay.edge_weights();
    let mut w2 = lay.face_weights();
    w2.extend(hb_weights);
    w2.extend(&e_weights);
    let face_len = |a: usize| lay.faces[a].len();
    Ok(PortSystem {
        label: "maxwell3d".into(),
        x1: GramSpace::diagonal(&e_weights)?,
        x2: GramSpace::diagonal(&w2)?,
        u1: GramSpace::trivial(),
        u2: GramSpace::diagonal(&n_weights)?,
        l,
        k,
        gamma1: DMatrix::zeros(0, ne),
        gamma2,
        beta1,
        beta2: DMatrix::zeros(0, n2),
        x1_layout: Layout::new(&[
            ("Ex", lay.edges[0].len()),
            ("Ey", lay.edges[1].len()),
            ("Ez", lay.edges[2].len()),
        ]),
        x2_layout: Layout::new(&[
            ("Hx", face_len(0)),
            ("Hy", face_len(1)),
            ("Hz", face_len(2)),
            ("Hb", nb),
            ("J", ne),
        ]),
    })
}
