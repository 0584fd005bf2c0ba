use alloc::borrow::Cow;
use alloc::vec::Vec;

/// One signed objective contribution, `scale * raw`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveTerm {
    pub name: Cow<'static, str>,
    pub raw: f64,
    pub scale: f64,
}

impl ObjectiveTerm {
    pub fn new(name: impl Into<Cow<'static, str>>, raw: f64, scale: f64) -> Self {
        Self {
            name: name.into(),
            raw,
            scale,
        }
    }

    pub fn contribution(&self) -> f64 {
        self.scale * self.raw
    }
}

/// A non-negative constraint violation degree and its penalty weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationTerm {
    pub name: Cow<'static, str>,
    pub degree: f64,
    pub weight: f64,
}

impl ViolationTerm {
    pub fn new(name: impl Into<Cow<'static, str>>, degree: f64, weight: f64) -> Self {
        Self {
            name: name.into(),
            degree: degree.max(0.0),
            weight,
        }
    }

    pub fn penalty(&self) -> f64 {
        self.weight * self.degree
    }
}

/// Minimization fitness with its full decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Fitness {
    pub total: f64,
    pub objective_terms: Vec<ObjectiveTerm>,
    pub violation_terms: Vec<ViolationTerm>,
}

impl Fitness {
    pub fn new(objective_terms: Vec<ObjectiveTerm>, violation_terms: Vec<ViolationTerm>) -> Self {
        let mut f = Self {
            total: 0.0,
            objective_terms,
            violation_terms,
        };
        f.total = f.recompute_total();
        f
    }

    /// Objective contributions first, then penalties, each in stored order.
    pub fn recompute_total(&self) -> f64 {
        let mut total = 0.0;
        for t in &self.objective_terms {
            total += t.contribution();
        }
        for v in &self.violation_terms {
            total += v.penalty();
        }
        total
    }

    pub fn is_feasible(&self) -> bool {
        self.violation_terms.iter().all(|v| v.degree == 0.0)
    }

    pub fn objective(&self, name: &str) -> Option<&ObjectiveTerm> {
        self.objective_terms.iter().find(|t| t.name == name)
    }

    pub fn violation(&self, name: &str) -> Option<&ViolationTerm> {
        self.violation_terms.iter().find(|t| t.name == name)
    }

    /// Sum of objective contributions, penalties excluded.
    pub fn objective_value(&self) -> f64 {
        self.objective_terms.iter().map(|t| t.contribution()).sum()
    }
}
