//! Token-level F1 for extractive question answering, following the
//! SQuAD v1.1 evaluation convention.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::MetricError;

/// Normalize an answer: lowercase, drop ASCII punctuation, split on
/// whitespace, and remove the articles "a", "an", "the".
pub fn normalize_answer(text: &str) -> Vec<String> {
    let cleaned: String = text
        .to_lowercase()
        .chars()
        .filter(|c| !c.is_ascii_punctuation())
        .collect();
    cleaned
        .split_whitespace()
        .filter(|t| !matches!(*t, "a" | "an" | "the"))
        .map(String::from)
        .collect()
}

fn counts(tokens: &[String]) -> BTreeMap<&str, usize> {
    let mut map = BTreeMap::new();
    for t in tokens {
        *map.entry(t.as_str()).or_insert(0) += 1;
    }
    map
}

fn token_f1(pred: &[String], reference: &[String]) -> f64 {
    if pred.is_empty() && reference.is_empty() {
        return 1.0; // both normalize to nothing: exact agreement
    }
    if pred.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let ref_counts = counts(reference);
    let pred_counts = counts(pred);
    let overlap: usize = pred_counts
        .iter()
        .map(|(tok, n)| (*n).min(*ref_counts.get(tok).unwrap_or(&0)))
        .sum();
    if overlap == 0 {
        return 0.0;
    }
    let precision = overlap as f64 / pred.len() as f64;
    let recall = overlap as f64 / reference.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Best token F1 of the prediction against any reference answer.
pub fn squad_f1(prediction: &str, references: &[String]) -> Result<f64, MetricError> {
    if references.is_empty() {
        return Err(MetricError::InvalidInput("no reference answers".into()));
    }
    let pred = normalize_answer(prediction);
    let best = references
        .iter()
        .map(|r| token_f1(&pred, &normalize_answer(r)))
        .fold(0.0f64, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn refs(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn exact_match_scores_one() {
        assert_eq!(squad_f1("the Eiffel Tower", &refs(&["Eiffel Tower"])).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_answers_score_zero() {
        assert_eq!(squad_f1("red house", &refs(&["blue whale"])).unwrap(), 0.0);
    }

    #[test]
    fn half_overlap() {
        // pred {x, y}, ref {y, z}: P = R = 0.5, F1 = 0.5
        assert_eq!(squad_f1("x y", &refs(&["y z"])).unwrap(), 0.5);
    }

    #[test]
    fn best_reference_wins() {
        let r = refs(&["completely different", "x y"]);
        assert_eq!(squad_f1("x y", &r).unwrap(), 1.0);
    }

    #[test]
    fn normalization_rules() {
        assert_eq!(normalize_answer("The quick, brown fox!"), refs(&["quick", "brown", "fox"]));
        assert_eq!(normalize_answer("An A The"), Vec::<String>::new());
        // punctuation is dropped, not replaced by spaces
        assert_eq!(normalize_answer("state-of-the-art"), refs(&["stateoftheart"]));
    }

    #[test]
    fn empty_vs_empty_is_one() {
        assert_eq!(squad_f1("the", &refs(&["a"])).unwrap(), 1.0);
        assert_eq!(squad_f1("word", &refs(&["the"])).unwrap(), 0.0);
    }

    #[test]
    fn repeated_tokens_use_multiset_overlap() {
        // pred {w, w}, ref {w}: overlap 1, P = 1/2, R = 1 -> F1 = 2/3
        let f1 = squad_f1("w w", &refs(&["w"])).unwrap();
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn no_references_is_an_error() {
        assert!(matches!(squad_f1("x", &[]), Err(MetricError::InvalidInput(_))));
    }
}
