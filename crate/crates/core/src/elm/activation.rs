use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::Result;
use crate::registry::{Named, Registry};

/// Hidden-node transfer function `G`.
pub trait Activation: Named + Send + Sync {
    fn apply(&self, z: f64) -> f64;

    fn apply_in_place(&self, values: &mut [f64]) {
        for v in values {
            *v = self.apply(*v);
        }
    }
}

impl fmt::Debug for dyn Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Activation({})", self.name())
    }
}

pub struct Sigmoid;

impl Named for Sigmoid {
    fn name(&self) -> &'static str {
        "sigmoid"
    }
}

impl Activation for Sigmoid {
    fn apply(&self, z: f64) -> f64 {
        1.0 / (1.0 + (-z).exp())
    }
}

pub struct Tanh;

impl Named for Tanh {
    fn name(&self) -> &'static str {
        "tanh"
    }
}

impl Activation for Tanh {
    fn apply(&self, z: f64) -> f64 {
        z.tanh()
    }
}

pub fn registry() -> &'static Registry<dyn Activation> {
    static REGISTRY: OnceLock<Registry<dyn Activation>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg: Registry<dyn Activation> = Registry::new("activation");
        reg.register(Arc::new(Sigmoid)).register(Arc::new(Tanh));
        reg
    })
}

pub fn by_name(name: &str) -> Result<Arc<dyn Activation>> {
    registry().get(name)
}

pub fn sigmoid() -> Arc<dyn Activation> {
    Arc::new(Sigmoid)
}

pub fn tanh() -> Arc<dyn Activation> {
    Arc::new(Tanh)
}
