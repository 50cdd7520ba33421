//! Structured box mesh: a matter box `[0, L]^3` optionally wrapped in a
//! free-space shell along each axis.

use serde::{Deserialize, Serialize};

use super::element::{eval_point, gauss_points, QuadPoint};
use crate::error::{Error, Result};
use crate::tensor::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    #[serde(rename = "-x")]
    XMinus,
    #[serde(rename = "+x")]
    XPlus,
    #[serde(rename = "-y")]
    YMinus,
    #[serde(rename = "+y")]
    YPlus,
    #[serde(rename = "-z")]
    ZMinus,
    #[serde(rename = "+z")]
    ZPlus,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::XMinus, Face::XPlus, Face::YMinus, Face::YPlus, Face::ZMinus, Face::ZPlus];

    pub fn axis(self) -> usize {
        match self {
            Face::XMinus | Face::XPlus => 0,
            Face::YMinus | Face::YPlus => 1,
            Face::ZMinus | Face::ZPlus => 2,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Face::XMinus | Face::YMinus | Face::ZMinus => -1.0,
            _ => 1.0,
        }
    }

    pub fn from_axis(axis: usize, positive: bool) -> Face {
        Face::ALL[2 * axis + usize::from(positive)]
    }

    pub fn normal(self) -> Vec3 {
        Vec3::unit(self.axis()) * self.sign()
    }

    pub fn name(self) -> &'static str {
        ["-x", "+x", "-y", "+y", "-z", "+z"][self as usize]
    }

    pub fn parse(s: &str) -> Option<Face> {
        Face::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Matter,
    FreeSpace,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxMeshSpec {
    /// Matter box edge lengths.
    pub extents: [f64; 3],
    /// Matter cells per axis.
    pub cells: [usize; 3],
    /// Free-space shell thickness per axis; zero for no shell.
    #[serde(default)]
    pub shell_thickness: [f64; 3],
    /// Shell cells per axis on each side.
    #[serde(default)]
    pub shell_cells: [usize; 3],
}

impl BoxMeshSpec {
    pub fn matter_only(extents: [f64; 3], cells: [usize; 3]) -> Self {
        BoxMeshSpec { extents, cells, shell_thickness: [0.0; 3], shell_cells: [0; 3] }
    }

    pub fn validate(&self) -> Result<()> {
        for a in 0..3 {
            let name = ["x", "y", "z"][a];
            if !(self.extents[a] > 0.0 && self.extents[a].is_finite()) {
                return Err(Error::InvalidInput(format!("extent along {name} must be positive")));
            }
            if self.cells[a] == 0 {
                return Err(Error::InvalidInput(format!("cell count along {name} must be at least 1")));
            }
            let t = self.shell_thickness[a];
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidInput(format!("shell thickness along {name} must be non-negative")));
            }
            if (t > 0.0) != (self.shell_cells[a] > 0) {
                return Err(Error::InvalidInput(format!(
                    "shell along {name} needs both a positive thickness and a positive cell count"
                )));
            }
        }
        Ok(())
    }

    pub fn has_shell(&self, axis: usize) -> bool {
        self.shell_cells[axis] > 0
    }
}

#[derive(Clone, Debug)]
pub struct Element {
    pub nodes: [usize; 8],
    pub region: Region,
    pub coords: [Vec3; 8],
    pub quad: Vec<QuadPoint>,
}

/// Boundary facet of the matter box.
#[derive(Clone, Copy, Debug)]
pub struct MatterFacet {
    pub element: usize,
    pub face: Face,
    /// Free-space element across the facet, if any. Facets with a neighbor
    /// form the interface.
    pub neighbor: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub spec: BoxMeshSpec,
    pub nodes: Vec<Vec3>,
    pub elements: Vec<Element>,
    pub facets: Vec<MatterFacet>,
    pub node_in_matter: Vec<bool>,
    dims: [usize; 3],
    axis_coords: [Vec<f64>; 3],
}

impl Mesh {
    pub fn new(spec: BoxMeshSpec) -> Result<Mesh> {
        spec.validate()?;
        let axis_coords: [Vec<f64>; 3] = std::array::from_fn(|a| {
            let (l, n, t, s) = (spec.extents[a], spec.cells[a], spec.shell_thickness[a], spec.shell_cells[a]);
            let mut c = Vec::with_capacity(n + 2 * s + 1);
            for i in 0..s {
                c.push(-t + t * i as f64 / s as f64);
            }
            for i in 0..=n {
                c.push(l * i as f64 / n as f64);
            }
            for i in 1..=s {
                c.push(l + t * i as f64 / s as f64);
            }
            c
        });
        let dims: [usize; 3] = std::array::from_fn(|a| axis_coords[a].len());
        let mut nodes = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    nodes.push(Vec3::new(axis_coords[0][i], axis_coords[1][j], axis_coords[2][k]));
                }
            }
        }
        let cells: [usize; 3] = std::array::from_fn(|a| dims[a] - 1);
        let in_matter = |a: usize, i: usize| i >= spec.shell_cells[a] && i < spec.shell_cells[a] + spec.cells[a];
        let node_id = |i: usize, j: usize, k: usize| i + dims[0] * (j + dims[1] * k);

        let mut elements = Vec::with_capacity(cells[0] * cells[1] * cells[2]);
        let mut node_in_matter = vec![false; nodes.len()];
        for k in 0..cells[2] {
            for j in 0..cells[1] {
                for i in 0..cells[0] {
                    let ids = [
                        node_id(i, j, k),
                        node_id(i + 1, j, k),
                        node_id(i + 1, j + 1, k),
                        node_id(i, j + 1, k),
                        node_id(i, j, k + 1),
                        node_id(i + 1, j, k + 1),
                        node_id(i + 1, j + 1, k + 1),
                        node_id(i, j + 1, k + 1),
                    ];
                    let matter = in_matter(0, i) && in_matter(1, j) && in_matter(2, k);
                    if matter {
                        for n in ids {
                            node_in_matter[n] = true;
                        }
                    }
                    let coords = ids.map(|n| nodes[n]);
                    let id = elements.len();
                    let quad = gauss_points()
                        .map(|xi| eval_point(&coords, xi, 1.0))
                        .collect::<Option<Vec<_>>>()
                        .ok_or(Error::NonPositiveJacobian { jacobian: 0.0, element: Some(id) })?;
                    elements.push(Element {
                        nodes: ids,
                        region: if matter { Region::Matter } else { Region::FreeSpace },
                        coords,
                        quad,
                    });
                }
            }
        }

        let elem_id = |c: [usize; 3]| c[0] + cells[0] * (c[1] + cells[1] * c[2]);
        let mut facets = Vec::new();
        for k in 0..cells[2] {
            for j in 0..cells[1] {
                for i in 0..cells[0] {
                    let c = [i, j, k];
                    let e = elem_id(c);
                    if elements[e].region != Region::Matter {
                        continue;
                    }
                    for face in Face::ALL {
                        let a = face.axis();
                        let mut n = c;
                        let exists = if face.sign() > 0.0 {
                            n[a] += 1;
                            n[a] < cells[a]
                        } else if n[a] > 0 {
                            n[a] -= 1;
                            true
                        } else {
                            false
                        };
                        let neighbor = exists.then(|| elem_id(n));
                        match neighbor {
                            Some(nb) if elements[nb].region == Region::Matter => {}
                            _ => facets.push(MatterFacet { element: e, face, neighbor }),
                        }
                    }
                }
            }
        }

        Ok(Mesh { spec, nodes, elements, facets, node_in_matter, dims, axis_coords })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn axis_coords(&self, axis: usize) -> &[f64] {
        &self.axis_coords[axis]
    }

    pub fn matter_volume(&self) -> f64 {
        self.spec.extents.iter().product()
    }

    /// Nodes on the outer surface of the free-space shell, on axes that
    /// carry a shell.
    pub fn truncation_nodes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (n, x) in self.nodes.iter().enumerate() {
            let on = (0..3).any(|a| {
                self.spec.has_shell(a)
                    && (x[a] == self.axis_coords[a][0] || x[a] == *self.axis_coords[a].last().unwrap())
            });
            if on {
                out.push(n);
            }
        }
        out
    }

    /// Nodes lying on the given face of the matter box.
    pub fn matter_face_nodes(&self, face: Face) -> Vec<usize> {
        let a = face.axis();
        let target = if face.sign() > 0.0 { self.spec.extents[a] } else { 0.0 };
        (0..self.n_nodes())
            .filter(|&n| self.node_in_matter[n] && (self.nodes[n][a] - target).abs() < 1e-12 * (1.0 + target.abs()))
            .collect()
    }

    /// Nodes lying on the given face of the whole domain.
    pub fn domain_face_nodes(&self, face: Face) -> Vec<usize> {
        let a = face.axis();
        let c = &self.axis_coords[a];
        let target = if face.sign() > 0.0 { *c.last().unwrap() } else { c[0] };
        (0..self.n_nodes()).filter(|&n| self.nodes[n][a] == target).collect()
    }

    pub fn matter_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&n| self.node_in_matter[n]).collect()
    }

    /// Node nearest to a point.
    pub fn nearest_node(&self, x: &Vec3) -> usize {
        let mut best = (0, f64::INFINITY);
        for (n, y) in self.nodes.iter().enumerate() {
            let d = (*y - *x).norm_squared();
            if d < best.1 {
                best = (n, d);
            }
        }
        best.0
    }

    pub fn interface_facets(&self) -> impl Iterator<Item = &MatterFacet> {
        self.facets.iter().filter(|f| f.neighbor.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shelled() -> Mesh {
        Mesh::new(BoxMeshSpec {
            extents: [1.0, 1.0, 1.0],
            cells: [2, 2, 2],
            shell_thickness: [0.5, 0.5, 0.5],
            shell_cells: [1, 1, 1],
        })
        .unwrap()
    }

    #[test]
    fn counts_and_regions() {
        let m = shelled();
        assert_eq!(m.n_nodes(), 125);
        assert_eq!(m.elements.len(), 64);
        assert_eq!(m.elements.iter().filter(|e| e.region == Region::Matter).count(), 8);
        assert_eq!(m.matter_nodes().len(), 27);
        // 6 faces x 4 facets, all on the interface
        assert_eq!(m.facets.len(), 24);
        assert_eq!(m.interface_facets().count(), 24);
        assert_eq!(m.truncation_nodes().len(), 125 - 27);
    }

    #[test]
    fn volumes_sum_to_domain() {
        let m = shelled();
        let v: f64 = m.elements.iter().flat_map(|e| e.quad.iter()).map(|q| q.weight).sum();
        assert!((v - 8.0).abs() < 1e-12);
        let vm: f64 = m
            .elements
            .iter()
            .filter(|e| e.region == Region::Matter)
            .flat_map(|e| e.quad.iter())
            .map(|q| q.weight)
            .sum();
        assert!((vm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slab_without_lateral_shell() {
        let m = Mesh::new(BoxMeshSpec {
            extents: [1.0, 1.0, 1.0],
            cells: [1, 1, 2],
            shell_thickness: [0.0, 0.0, 1.0],
            shell_cells: [0, 0, 2],
        })
        .unwrap();
        assert_eq!(m.elements.len(), 6);
        assert_eq!(m.interface_facets().count(), 2);
        assert_eq!(m.facets.len(), 2 + 4 * 2);
        assert_eq!(m.truncation_nodes().len(), 8);
        assert_eq!(m.matter_face_nodes(Face::ZPlus).len(), 4);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(Mesh::new(BoxMeshSpec::matter_only([1.0, 0.0, 1.0], [1, 1, 1])).is_err());
        assert!(Mesh::new(BoxMeshSpec::matter_only([1.0, 1.0, 1.0], [1, 0, 1])).is_err());
        let bad = BoxMeshSpec { shell_thickness: [1.0, 0.0, 0.0], ..BoxMeshSpec::matter_only([1.0; 3], [1; 3]) };
        assert!(Mesh::new(bad).is_err());
    }

    #[test]
    fn face_names_round_trip() {
        for f in Face::ALL {
            assert_eq!(Face::parse(f.name()), Some(f));
            assert_eq!(Face::from_axis(f.axis(), f.sign() > 0.0), f);
        }
    }
}
