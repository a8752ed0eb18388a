use anyhow::{bail, Context, Result};
use polytower_core::connectivity::Budgets;
use polytower_core::rational::{self, Rational};

pub const BUDGETS_VAR: &str = "POLYTOWER_BUDGETS";

/// Applies `pi1=…,filler=…,nerve=…` on top of `base`.
pub fn parse_budgets(text: &str, mut base: Budgets) -> Result<Budgets> {
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').with_context(|| format!("{BUDGETS_VAR}: expected key=value, got {part:?}"))?;
        let value: u64 = value.trim().parse().with_context(|| format!("{BUDGETS_VAR}: bad number in {part:?}"))?;
        match key.trim() {
            "pi1" => base.pi1_steps = value,
            "filler" => base.filler_steps = value,
            "nerve" => base.nerve_subsets = value,
            other => bail!("{BUDGETS_VAR}: unknown budget {other:?} (expected pi1, filler or nerve)"),
        }
    }
    Ok(base)
}

/// Defaults, then the environment, then explicit flags.
pub fn budgets(env: Option<&str>, pi1: Option<u64>, filler: Option<u64>, nerve: Option<u64>) -> Result<Budgets> {
    let mut b = match env {
        Some(text) => parse_budgets(text, Budgets::default())?,
        None => Budgets::default(),
    };
    if let Some(v) = pi1 {
        b.pi1_steps = v;
    }
    if let Some(v) = filler {
        b.filler_steps = v;
    }
    if let Some(v) = nerve {
        b.nerve_subsets = v;
    }
    if b.pi1_steps == 0 || b.filler_steps == 0 || b.nerve_subsets == 0 {
        bail!("budgets must be positive");
    }
    Ok(b)
}

pub fn positive_rational(s: &str, what: &str) -> Result<Rational> {
    let r = rational::parse(s).map_err(|e| anyhow::anyhow!("{what}: {e}"))?;
    if r <= rational::zero() {
        bail!("{what} must be positive");
    }
    Ok(r)
}

/// `b^{-1}, b^{-2}, …` for `levels` levels.
pub fn scales_from_base(base: &Rational, levels: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(levels);
    let mut s = rational::one();
    for _ in 0..levels {
        s = s / base;
        out.push(s.clone());
    }
    out
}
