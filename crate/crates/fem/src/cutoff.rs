use serde::{Deserialize, Serialize};

use crate::field::FieldVector;
use crate::mesh::{Domain, Mesh, Point};
use crate::FemError;

/// `e^{1 - 1/(1 - |x - x₀|²/s²)}` inside the disc of radius `s`, zero outside.
pub fn cutoff(x: Point, center: Point, radius: f64) -> f64 {
    let q = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)) / (radius * radius);
    if q >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - q)).exp()
    }
}

/// Weighted sum of cutoff bumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCutoff")]
pub struct CutoffSpec {
    pub centers: Vec<Point>,
    pub radii: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawCutoff {
    centers: Vec<Point>,
    radii: Vec<f64>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

impl TryFrom<RawCutoff> for CutoffSpec {
    type Error = FemError;
    fn try_from(raw: RawCutoff) -> Result<Self, FemError> {
        let weights = raw.weights.unwrap_or_else(|| vec![1.0; raw.centers.len()]);
        Self::with_weights(raw.centers, raw.radii, weights)
    }
}

impl CutoffSpec {
    /// Unit weights.
    pub fn new(centers: Vec<Point>, radii: Vec<f64>) -> Result<Self, FemError> {
        let weights = vec![1.0; centers.len()];
        Self::with_weights(centers, radii, weights)
    }

    pub fn with_weights(centers: Vec<Point>, radii: Vec<f64>, weights: Vec<f64>) -> Result<Self, FemError> {
        if centers.is_empty() || centers.len() != radii.len() || centers.len() != weights.len() {
            return Err(FemError::Field(
                "cutoff centers, radii and weights must be nonempty and of equal length".into(),
            ));
        }
        if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(FemError::Field("cutoff radii must be positive".into()));
        }
        if centers.iter().flatten().chain(&weights).any(|v| !v.is_finite()) {
            return Err(FemError::Field("cutoff centers and weights must be finite".into()));
        }
        Ok(Self { centers, radii, weights })
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.centers
            .iter()
            .zip(&self.radii)
            .zip(&self.weights)
            .map(|((c, r), w)| w * cutoff(x, *c, *r))
            .sum()
    }
}

/// The four initial data of the simulation campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    Phi1Omega1,
    Phi2Omega1,
    Phi1Omega2,
    Phi2Omega2,
}

impl InitialCondition {
    pub const ALL: [InitialCondition; 4] = [
        InitialCondition::Phi1Omega1,
        InitialCondition::Phi2Omega1,
        InitialCondition::Phi1Omega2,
        InitialCondition::Phi2Omega2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            InitialCondition::Phi1Omega1 => "phi1_omega1",
            InitialCondition::Phi2Omega1 => "phi2_omega1",
            InitialCondition::Phi1Omega2 => "phi1_omega2",
            InitialCondition::Phi2Omega2 => "phi2_omega2",
        }
    }

    pub fn spec(self) -> CutoffSpec {
        let (centers, radii) = match self {
            InitialCondition::Phi1Omega1 => (vec![[-0.5, -0.5]], vec![0.3]),
            InitialCondition::Phi2Omega1 => (vec![[-0.5, -0.3], [-0.55, 0.55]], vec![0.35, 0.25]),
            InitialCondition::Phi1Omega2 => (vec![[-0.5, -0.5]], vec![0.35]),
            InitialCondition::Phi2Omega2 => (vec![[-0.1, -0.55], [-0.55, 0.55]], vec![0.35, 0.25]),
        };
        CutoffSpec::new(centers, radii).expect("preset is valid")
    }

    /// Domain the datum is posed on.
    pub fn domain(self) -> Domain {
        match self {
            InitialCondition::Phi1Omega1 | InitialCondition::Phi2Omega1 => Domain::l_shape(),
            InitialCondition::Phi1Omega2 | InitialCondition::Phi2Omega2 => Domain::eccentric_annulus(),
        }
    }

    /// Whether domain and datum are both invariant under `(x, y) ↦ (y, x)`.
    pub fn is_symmetric(self) -> bool {
        matches!(self, InitialCondition::Phi1Omega1 | InitialCondition::Phi1Omega2)
    }
}

/// Vertex values of the cutoff sum; boundary vertices are set to zero.
pub fn cutoff_field(mesh: &Mesh, spec: &CutoffSpec) -> FieldVector {
    FieldVector::interpolate(mesh, |x| spec.eval(x))
}
