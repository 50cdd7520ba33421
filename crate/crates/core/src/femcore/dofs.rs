//! Degree-of-freedom numbering, nodal field storage and Dirichlet masks.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::mesh::{Face, Mesh};
use crate::error::{Error, Result};
use crate::species::Pair;
use crate::tensor::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Potential,
    Electronic,
    Placement,
}

/// Per-node unknowns: the potential and placement everywhere, the two order
/// parameters on matter nodes only.
#[derive(Clone, Debug)]
pub struct DofLayout {
    pub potential: Vec<usize>,
    pub placement: Vec<[usize; 3]>,
    /// `[trans x, y, z, cis x, y, z]` on matter nodes.
    pub order: Vec<Option<[usize; 6]>>,
    pub kind: Vec<FieldKind>,
    pub node: Vec<usize>,
    pub fixed: Vec<bool>,
}

impl DofLayout {
    pub fn new(mesh: &Mesh) -> Self {
        let n = mesh.n_nodes();
        let mut potential = Vec::with_capacity(n);
        let mut placement = Vec::with_capacity(n);
        let mut order = Vec::with_capacity(n);
        let mut kind = Vec::new();
        let mut node = Vec::new();
        let mut next = 0usize;
        let mut take = |k: FieldKind, a: usize, kind: &mut Vec<FieldKind>, node: &mut Vec<usize>| {
            kind.push(k);
            node.push(a);
            next += 1;
            next - 1
        };
        for a in 0..n {
            potential.push(take(FieldKind::Potential, a, &mut kind, &mut node));
            if mesh.node_in_matter[a] {
                order.push(Some(std::array::from_fn(|_| take(FieldKind::Electronic, a, &mut kind, &mut node))));
            } else {
                order.push(None);
            }
            placement.push(std::array::from_fn(|_| take(FieldKind::Placement, a, &mut kind, &mut node)));
        }
        let fixed = vec![false; kind.len()];
        DofLayout { potential, placement, order, kind, node, fixed }
    }

    pub fn n_dofs(&self) -> usize {
        self.kind.len()
    }

    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.n_dofs()).filter(|&d| !self.fixed[d]).collect()
    }

    pub fn node_dofs(&self, node: usize, field: FieldKind) -> Vec<usize> {
        match field {
            FieldKind::Potential => vec![self.potential[node]],
            FieldKind::Placement => self.placement[node].to_vec(),
            FieldKind::Electronic => self.order[node].map(|d| d.to_vec()).unwrap_or_default(),
        }
    }

    pub fn fix_nodes(&mut self, nodes: &[usize], field: FieldKind) {
        for &n in nodes {
            for d in self.node_dofs(n, field) {
                self.fixed[d] = true;
            }
        }
    }

    /// Fixes the potential and placement on the outer surface of the shell.
    pub fn fix_truncation_boundary(&mut self, mesh: &Mesh) {
        let nodes = mesh.truncation_nodes();
        self.fix_nodes(&nodes, FieldKind::Potential);
        self.fix_nodes(&nodes, FieldKind::Placement);
    }
}

/// Nodal values of the three fields (or of their rates or momenta).
#[derive(Clone, Debug, PartialEq)]
pub struct NodalFields {
    pub potential: Vec<f64>,
    pub order: Vec<Pair<Vec3>>,
    pub placement: Vec<Vec3>,
}

impl NodalFields {
    pub fn zeros(n: usize) -> Self {
        NodalFields { potential: vec![0.0; n], order: vec![Pair::default(); n], placement: vec![Vec3::ZERO; n] }
    }

    /// Reference configuration: zero potential and order, identity placement.
    pub fn reference(mesh: &Mesh) -> Self {
        NodalFields { placement: mesh.nodes.clone(), ..NodalFields::zeros(mesh.n_nodes()) }
    }

    pub fn to_vector(&self, layout: &DofLayout) -> DVector<f64> {
        let mut v = DVector::zeros(layout.n_dofs());
        for n in 0..self.potential.len() {
            v[layout.potential[n]] = self.potential[n];
            for c in 0..3 {
                v[layout.placement[n][c]] = self.placement[n][c];
            }
            if let Some(d) = layout.order[n] {
                for c in 0..3 {
                    v[d[c]] = self.order[n].trans[c];
                    v[d[3 + c]] = self.order[n].cis[c];
                }
            }
        }
        v
    }

    pub fn from_vector(layout: &DofLayout, v: &DVector<f64>) -> Self {
        let n = layout.potential.len();
        let mut f = NodalFields::zeros(n);
        for a in 0..n {
            f.potential[a] = v[layout.potential[a]];
            f.placement[a] = Vec3::from_fn(|c| v[layout.placement[a][c]]);
            if let Some(d) = layout.order[a] {
                f.order[a] = Pair::new(Vec3::from_fn(|c| v[d[c]]), Vec3::from_fn(|c| v[d[3 + c]]));
            }
        }
        f
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub time: f64,
    pub fields: NodalFields,
    pub rates: Option<NodalFields>,
    pub momenta: Option<NodalFields>,
}

impl FieldState {
    pub fn reference(mesh: &Mesh) -> Self {
        FieldState { time: 0.0, fields: NodalFields::reference(mesh), rates: None, momenta: None }
    }

    pub fn with_vector(&self, layout: &DofLayout, v: &DVector<f64>, time: f64) -> Self {
        FieldState { time, fields: NodalFields::from_vector(layout, v), rates: None, momenta: None }
    }
}

/// Node selection for boundary conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeSet {
    All,
    Matter,
    Truncation,
    MatterFace(Face),
    DomainFace(Face),
}

impl NodeSet {
    pub fn parse(s: &str) -> Option<NodeSet> {
        match s {
            "all" => Some(NodeSet::All),
            "matter" => Some(NodeSet::Matter),
            "truncation" => Some(NodeSet::Truncation),
            _ => {
                let (kind, face) = s.split_once(':')?;
                let face = Face::parse(face)?;
                match kind {
                    "matter" => Some(NodeSet::MatterFace(face)),
                    "domain" => Some(NodeSet::DomainFace(face)),
                    _ => None,
                }
            }
        }
    }

    pub fn nodes(&self, mesh: &Mesh) -> Vec<usize> {
        match *self {
            NodeSet::All => (0..mesh.n_nodes()).collect(),
            NodeSet::Matter => mesh.matter_nodes(),
            NodeSet::Truncation => mesh.truncation_nodes(),
            NodeSet::MatterFace(f) => mesh.matter_face_nodes(f),
            NodeSet::DomainFace(f) => mesh.domain_face_nodes(f),
        }
    }
}

/// Value imposed on constrained dofs; `None` keeps the current value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DirichletValue {
    Potential(f64),
    Displacement(Vec3),
    Order(Pair<Vec3>),
}

/// Fixes `field` on `set` and writes `value` into `fields` where given.
pub fn apply_dirichlet(
    mesh: &Mesh,
    layout: &mut DofLayout,
    fields: &mut NodalFields,
    set: NodeSet,
    field: FieldKind,
    value: Option<DirichletValue>,
) -> Result<usize> {
    let nodes = set.nodes(mesh);
    if field == FieldKind::Electronic && !nodes.iter().any(|&n| mesh.node_in_matter[n]) {
        return Err(Error::InvalidInput("electronic constraint on a node set without matter nodes".into()));
    }
    if nodes.is_empty() {
        return Err(Error::InvalidInput("constraint selects no nodes".into()));
    }
    for &n in &nodes {
        match (field, value) {
            (_, None) => {}
            (FieldKind::Potential, Some(DirichletValue::Potential(v))) => fields.potential[n] = v,
            (FieldKind::Placement, Some(DirichletValue::Displacement(u))) => fields.placement[n] = mesh.nodes[n] + u,
            (FieldKind::Electronic, Some(DirichletValue::Order(y))) => {
                if mesh.node_in_matter[n] {
                    fields.order[n] = y;
                }
            }
            _ => return Err(Error::InvalidInput(format!("value type does not match constrained field {field:?}"))),
        }
    }
    layout.fix_nodes(&nodes, field);
    Ok(nodes.len())
}

#[cfg(test)]
mod tests {
    use super::super::mesh::BoxMeshSpec;
    use super::*;

    #[test]
    fn matter_only_cube_layout() {
        let mesh = Mesh::new(BoxMeshSpec::matter_only([1.0; 3], [1; 3])).unwrap();
        let layout = DofLayout::new(&mesh);
        assert_eq!(layout.n_dofs(), 8 * 10);
        assert!(layout.order.iter().all(Option::is_some));
    }

    #[test]
    fn electronic_dofs_absent_in_free_space() {
        let mesh = Mesh::new(BoxMeshSpec {
            extents: [1.0; 3],
            cells: [1; 3],
            shell_thickness: [1.0; 3],
            shell_cells: [1; 3],
        })
        .unwrap();
        let layout = DofLayout::new(&mesh);
        assert_eq!(layout.n_dofs(), 64 * 4 + 8 * 6);
        let n_elec = layout.kind.iter().filter(|k| **k == FieldKind::Electronic).count();
        assert_eq!(n_elec, 48);
    }

    #[test]
    fn vector_round_trip() {
        let mesh = Mesh::new(BoxMeshSpec::matter_only([1.0, 2.0, 1.0], [2, 1, 1])).unwrap();
        let layout = DofLayout::new(&mesh);
        let mut f = NodalFields::reference(&mesh);
        f.potential[3] = 1.5;
        f.order[2].cis = Vec3::new(0.1, 0.2, 0.3);
        let v = f.to_vector(&layout);
        assert_eq!(NodalFields::from_vector(&layout, &v), f);
    }

    #[test]
    fn node_set_parsing() {
        assert_eq!(NodeSet::parse("matter:-x"), Some(NodeSet::MatterFace(Face::XMinus)));
        assert_eq!(NodeSet::parse("domain:+z"), Some(NodeSet::DomainFace(Face::ZPlus)));
        assert_eq!(NodeSet::parse("all"), Some(NodeSet::All));
        assert_eq!(NodeSet::parse("side:+q"), None);
    }

    #[test]
    fn electronic_constraint_needs_matter() {
        let mesh = Mesh::new(BoxMeshSpec {
            extents: [1.0; 3],
            cells: [1; 3],
            shell_thickness: [1.0, 0.0, 0.0],
            shell_cells: [1, 0, 0],
        })
        .unwrap();
        let mut layout = DofLayout::new(&mesh);
        let mut f = NodalFields::reference(&mesh);
        let r = apply_dirichlet(&mesh, &mut layout, &mut f, NodeSet::DomainFace(Face::XPlus), FieldKind::Electronic, None);
        assert!(r.is_err());
    }
}
