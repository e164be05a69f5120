use elmboost::{Error, Result};

/// Parses `1..21`, `1-21`, `10..100:10` and comma-separated mixes into a sorted,
/// duplicate-free list.
pub fn parse_values(spec: &str) -> Result<Vec<usize>> {
    let bad = |part: &str| Error::invalid(format!("cannot parse `{part}` as a value or range"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (range, step) = match part.split_once(':') {
            Some((r, s)) => (r, s.parse::<usize>().map_err(|_| bad(part))?),
            None => (part, 1),
        };
        if step == 0 {
            return Err(bad(part));
        }
        let bounds = range.split_once("..").or_else(|| range.split_once('-'));
        match bounds {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad(part))?;
                let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad(part))?;
                if lo > hi {
                    return Err(bad(part));
                }
                out.extend((lo..=hi).step_by(step));
            }
            None => out.push(range.parse().map_err(|_| bad(part))?),
        }
    }
    if out.is_empty() {
        return Err(Error::invalid(format!("no values in `{spec}`")));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_values("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_values("1-3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_values("1..=3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_values("10..30:10, 5,10").unwrap(), vec![5, 10, 20, 30]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_values("").is_err());
        assert!(parse_values("a").is_err());
        assert!(parse_values("5..1").is_err());
        assert!(parse_values("1..4:0").is_err());
    }
}
