//! Uniform Cartesian meshes of intervals (1D) and quadrilaterals (2D).
//!
//! Element `(ix, iy)` has flat index `iy * nx + ix`. Local faces follow the
//! reference-element numbering: `0 = -x`, `1 = +x`, `2 = -y`, `3 = +y`.

use crate::error::MeshError;

/// Name of the domain side a boundary face lies on, one per local face number.
pub const SIDE_NAMES: [&str; 4] = ["left", "right", "bottom", "top"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    Element(usize),
    /// Boundary face on the named domain side (index into [`SIDE_NAMES`]).
    Boundary(usize),
}

/// One mesh face, shared by at most two elements. The face normal points along
/// `+axis`, from `minus` to `plus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub axis: usize,
    pub minus: Neighbor,
    pub plus: Neighbor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub dim: usize,
    pub counts: [usize; 2],
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub periodic: [bool; 2],
}

impl MeshSpec {
    pub fn line(lo: f64, hi: f64, nx: usize, periodic: bool) -> Self {
        Self {
            dim: 1,
            counts: [nx, 1],
            lower: [lo, 0.0],
            upper: [hi, 0.0],
            periodic: [periodic, false],
        }
    }

    pub fn rect(lower: [f64; 2], upper: [f64; 2], counts: [usize; 2], periodic: [bool; 2]) -> Self {
        Self {
            dim: 2,
            counts,
            lower,
            upper,
            periodic,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MeshTopology {
    pub dim: usize,
    pub counts: [usize; 2],
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub periodic: [bool; 2],
    pub element_size: [f64; 2],
    /// Determinant of the affine reference-to-physical map.
    pub jacobian: f64,
    /// Per element, one entry per local face.
    pub neighbors: Vec<Vec<Neighbor>>,
    /// Per element, the global face index of each local face.
    pub element_faces: Vec<Vec<usize>>,
    pub faces: Vec<Face>,
    /// `A(k)`: the element itself plus its face neighbours, deduplicated.
    pub adjacency_with_self: Vec<Vec<usize>>,
}

impl MeshTopology {
    pub fn num_elements(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn element_ij(&self, k: usize) -> (usize, usize) {
        (k % self.counts[0], k / self.counts[0])
    }

    /// Lower-left corner of element `k`.
    pub fn element_origin(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.element_ij(k);
        [
            self.lower[0] + i as f64 * self.element_size[0],
            self.lower[1] + j as f64 * self.element_size[1],
        ]
    }

    /// Maps reference coordinates in `[-1, 1]^dim` of element `k` to physical space.
    pub fn map_point(&self, k: usize, xi: [f64; 2]) -> [f64; 2] {
        let o = self.element_origin(k);
        let mut x = [
            o[0] + 0.5 * (xi[0] + 1.0) * self.element_size[0],
            o[1] + 0.5 * (xi[1] + 1.0) * self.element_size[1],
        ];
        if self.dim == 1 {
            x[1] = 0.0;
        }
        x
    }

    pub fn element_volume(&self) -> f64 {
        if self.dim == 1 {
            self.element_size[0]
        } else {
            self.element_size[0] * self.element_size[1]
        }
    }

    pub fn domain_volume(&self) -> f64 {
        (0..self.dim)
            .map(|a| self.upper[a] - self.lower[a])
            .product()
    }

    pub fn min_element_size(&self) -> f64 {
        if self.dim == 1 {
            self.element_size[0]
        } else {
            self.element_size[0].min(self.element_size[1])
        }
    }

    pub fn num_boundary_faces(&self, k: usize) -> usize {
        self.neighbors[k]
            .iter()
            .filter(|n| matches!(n, Neighbor::Boundary(_)))
            .count()
    }
}

pub fn build_mesh(spec: &MeshSpec) -> Result<MeshTopology, MeshError> {
    let dim = spec.dim;
    if !(1..=2).contains(&dim) {
        return Err(MeshError::Dimension(dim));
    }
    let counts = if dim == 1 {
        [spec.counts[0], 1]
    } else {
        spec.counts
    };
    if counts[..dim].contains(&0) {
        return Err(MeshError::ElementCount(counts[..dim].to_vec()));
    }
    for axis in 0..dim {
        let (lo, hi) = (spec.lower[axis], spec.upper[axis]);
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(MeshError::Extent { axis, lo, hi });
        }
    }
    let periodic = if dim == 1 {
        [spec.periodic[0], false]
    } else {
        spec.periodic
    };
    let mut element_size = [0.0; 2];
    for axis in 0..dim {
        element_size[axis] = (spec.upper[axis] - spec.lower[axis]) / counts[axis] as f64;
    }
    let jacobian = if dim == 1 {
        element_size[0] / 2.0
    } else {
        element_size[0] * element_size[1] / 4.0
    };

    let (nx, ny) = (counts[0], counts[1]);
    let nel = nx * ny;
    let nfaces_local = 2 * dim;
    let idx = |i: usize, j: usize| j * nx + i;

    let mut faces = Vec::new();
    let mut element_faces = vec![vec![usize::MAX; nfaces_local]; nel];
    let mut neighbors = vec![vec![Neighbor::Boundary(0); nfaces_local]; nel];

    // x-normal faces: lines i = 0..=nx, with line nx folded onto 0 when periodic
    for j in 0..ny {
        let lines = if periodic[0] { nx } else { nx + 1 };
        for line in 0..lines {
            let minus = if line == 0 {
                if periodic[0] {
                    Neighbor::Element(idx(nx - 1, j))
                } else {
                    Neighbor::Boundary(0)
                }
            } else {
                Neighbor::Element(idx(line - 1, j))
            };
            let plus = if line == nx {
                Neighbor::Boundary(1)
            } else {
                Neighbor::Element(idx(line, j))
            };
            let f = faces.len();
            faces.push(Face {
                axis: 0,
                minus,
                plus,
            });
            if let Neighbor::Element(m) = minus {
                element_faces[m][1] = f;
                neighbors[m][1] = plus;
            }
            if let Neighbor::Element(p) = plus {
                element_faces[p][0] = f;
                neighbors[p][0] = minus;
            }
        }
    }
    if dim == 2 {
        for i in 0..nx {
            let lines = if periodic[1] { ny } else { ny + 1 };
            for line in 0..lines {
                let minus = if line == 0 {
                    if periodic[1] {
                        Neighbor::Element(idx(i, ny - 1))
                    } else {
                        Neighbor::Boundary(2)
                    }
                } else {
                    Neighbor::Element(idx(i, line - 1))
                };
                let plus = if line == ny {
                    Neighbor::Boundary(3)
                } else {
                    Neighbor::Element(idx(i, line))
                };
                let f = faces.len();
                faces.push(Face {
                    axis: 1,
                    minus,
                    plus,
                });
                if let Neighbor::Element(m) = minus {
                    element_faces[m][3] = f;
                    neighbors[m][3] = plus;
                }
                if let Neighbor::Element(p) = plus {
                    element_faces[p][2] = f;
                    neighbors[p][2] = minus;
                }
            }
        }
    }

    let adjacency_with_self = neighbors
        .iter()
        .enumerate()
        .map(|(k, nb)| {
            let mut set = vec![k];
            for n in nb {
                if let Neighbor::Element(e) = *n {
                    if !set.contains(&e) {
                        set.push(e);
                    }
                }
            }
            set
        })
        .collect();

    Ok(MeshTopology {
        dim,
        counts,
        lower: spec.lower,
        upper: spec.upper,
        periodic,
        element_size,
        jacobian,
        neighbors,
        element_faces,
        faces,
        adjacency_with_self,
    })
}
