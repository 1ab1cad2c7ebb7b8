use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::{
    ensemble_select, Candidate, CandidateTrace, ExternalMt, Fallback, Languages, PhraseTrace, PhraseTranslator,
    PipelineConfig, PipelineError, PipelineMode, QualityScorer, TranslationRecord,
};
use crate::cleaning::{
    filter_phrase_pairs, truncate_repeating_bigrams, PhrasePair, ScriptProfile, ScriptProfileTable,
    DEFAULT_BIGRAM_THRESHOLD,
};
use crate::corpus::{DependencyTree, ParallelCorpus};
use crate::decompose::{decompose, DecomposeContext, StopWords};
use crate::llm::{complete_chat, ChatBackend, ChatRequest, LimitedBackend};
use crate::prompts::{Demonstration, PromptSet};
use crate::retrieval::{Bm25Index, LcsIndex, Retriever, RetrieverKind, ScoredCandidate};

/// Demonstration order inside prompts: best score first, ties by pool id.
pub fn order_demonstrations(mut hits: Vec<ScoredCandidate>) -> Vec<ScoredCandidate> {
    hits.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.pool_id.cmp(&b.pool_id)));
    hits
}

pub struct PipelineBuilder {
    config: PipelineConfig,
    langs: Languages,
    pool: Arc<ParallelCorpus>,
    backend: Arc<dyn ChatBackend>,
    retriever: Option<Arc<dyn Retriever>>,
    prompts: PromptSet,
    stopwords: StopWords,
    trees: Option<BTreeMap<usize, DependencyTree>>,
    profile: Option<ScriptProfile>,
    scorer: Option<Arc<dyn QualityScorer>>,
}

impl PipelineBuilder {
    pub fn retriever(mut self, retriever: Arc<dyn Retriever>) -> Self {
        self.retriever = Some(retriever);
        self
    }

    pub fn prompts(mut self, prompts: PromptSet) -> Self {
        self.prompts = prompts;
        self
    }

    pub fn stopwords(mut self, stopwords: StopWords) -> Self {
        self.stopwords = stopwords;
        self
    }

    pub fn trees(mut self, trees: BTreeMap<usize, DependencyTree>) -> Self {
        self.trees = Some(trees);
        self
    }

    /// Overrides the script profile looked up from the target language.
    pub fn profile(mut self, profile: ScriptProfile) -> Self {
        self.profile = Some(profile);
        self
    }

    pub fn scorer(mut self, scorer: Arc<dyn QualityScorer>) -> Self {
        self.scorer = Some(scorer);
        self
    }

    pub fn build(self) -> Result<Pipeline, PipelineError> {
        self.config.validate()?;
        let retriever = match self.retriever {
            Some(r) => Some(r),
            None if self.pool.is_empty() => None,
            None => match self.config.retriever {
                RetrieverKind::Bm25 => Some(Arc::new(Bm25Index::with_defaults(&self.pool)?) as Arc<dyn Retriever>),
                RetrieverKind::Lcs => Some(Arc::new(LcsIndex::build(&self.pool)?) as Arc<dyn Retriever>),
                RetrieverKind::Cosine => None,
            },
        };
        let external_mt = match (&self.config.phrase_translator, &self.config.external_mt_endpoint) {
            (PhraseTranslator::ExternalMt, Some(url)) => Some(
                ExternalMt::new(url, Duration::from_secs_f64(self.config.external_mt_timeout_s))
                    .map_err(PipelineError::ExternalMt)?,
            ),
            _ => None,
        };
        let profile = self.profile.unwrap_or_else(|| ScriptProfileTable::embedded().profile(&self.langs.tgt));
        let threads = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.parallelism)
            .thread_name(|i| format!("comptra-{i}"))
            .build()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(Pipeline {
            backend: Arc::new(LimitedBackend::new(self.backend, self.config.parallelism)),
            config: self.config,
            langs: self.langs,
            pool: self.pool,
            retriever,
            prompts: self.prompts,
            stopwords: self.stopwords,
            trees: self.trees,
            profile,
            external_mt,
            scorer: self.scorer,
            threads,
        })
    }
}

pub struct Pipeline {
    config: PipelineConfig,
    langs: Languages,
    pool: Arc<ParallelCorpus>,
    backend: Arc<dyn ChatBackend>,
    retriever: Option<Arc<dyn Retriever>>,
    prompts: PromptSet,
    stopwords: StopWords,
    trees: Option<BTreeMap<usize, DependencyTree>>,
    profile: ScriptProfile,
    external_mt: Option<ExternalMt>,
    scorer: Option<Arc<dyn QualityScorer>>,
    pub(super) threads: rayon::ThreadPool,
}

/// LLM calls issued on behalf of one sentence.
#[derive(Default)]
struct Calls(AtomicUsize);

impl Calls {
    fn get(&self) -> usize {
        self.0.load(Ordering::SeqCst)
    }
}

impl Pipeline {
    /// The pool is only consulted by the few-shot, compositional and ensemble
    /// modes. Every LLM call passes through one shared bound of
    /// `config.parallelism` in-flight requests.
    pub fn builder(
        config: PipelineConfig,
        langs: Languages,
        pool: Arc<ParallelCorpus>,
        backend: Arc<dyn ChatBackend>,
    ) -> PipelineBuilder {
        PipelineBuilder {
            config,
            langs,
            pool,
            backend,
            retriever: None,
            prompts: PromptSet::embedded(),
            stopwords: StopWords::english(),
            trees: None,
            profile: None,
            scorer: None,
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn languages(&self) -> &Languages {
        &self.langs
    }

    pub fn profile(&self) -> &ScriptProfile {
        &self.profile
    }

    /// Translates one sentence; failures end up in the record's `error` field.
    pub fn translate(&self, sentence_id: usize, sentence: &str, mode: PipelineMode) -> TranslationRecord {
        let start = Instant::now();
        let calls = Calls::default();
        let mut rec = TranslationRecord::new(sentence_id, sentence, mode);
        if let Err(e) = self.threads.install(|| self.run_mode(&mut rec, mode, &calls)) {
            rec.error = Some(e.to_string());
        }
        rec.llm_calls = calls.get();
        rec.wall_time_ms = start.elapsed().as_millis() as u64;
        rec
    }

    pub fn translate_zero_shot(&self, sentence_id: usize, sentence: &str) -> Result<TranslationRecord, PipelineError> {
        self.translate_checked(sentence_id, sentence, PipelineMode::ZeroShot)
    }

    pub fn translate_few_shot(&self, sentence_id: usize, sentence: &str) -> Result<TranslationRecord, PipelineError> {
        self.translate_checked(sentence_id, sentence, PipelineMode::FewShot)
    }

    pub fn translate_comptra(&self, sentence_id: usize, sentence: &str) -> Result<TranslationRecord, PipelineError> {
        self.translate_checked(sentence_id, sentence, PipelineMode::Comptra)
    }

    pub fn translate_ensemble(&self, sentence_id: usize, sentence: &str) -> Result<TranslationRecord, PipelineError> {
        self.translate_checked(sentence_id, sentence, PipelineMode::Ensemble)
    }

    fn translate_checked(
        &self,
        sentence_id: usize,
        sentence: &str,
        mode: PipelineMode,
    ) -> Result<TranslationRecord, PipelineError> {
        let start = Instant::now();
        let calls = Calls::default();
        let mut rec = TranslationRecord::new(sentence_id, sentence, mode);
        self.threads.install(|| self.run_mode(&mut rec, mode, &calls))?;
        rec.llm_calls = calls.get();
        rec.wall_time_ms = start.elapsed().as_millis() as u64;
        Ok(rec)
    }

    fn run_mode(&self, rec: &mut TranslationRecord, mode: PipelineMode, calls: &Calls) -> Result<(), PipelineError> {
        let sentence = rec.source.trim().to_string();
        if sentence.is_empty() {
            return Err(PipelineError::EmptySentence);
        }
        match mode {
            PipelineMode::ZeroShot => self.zero_shot(rec, &sentence, calls),
            PipelineMode::FewShot => self.few_shot(rec, &sentence, calls),
            PipelineMode::Comptra => self.comptra(rec, &sentence, calls),
            PipelineMode::Ensemble => self.ensemble(rec, &sentence, calls),
        }
    }

    fn call(&self, prompt: String, max_new_tokens: u32, calls: &Calls) -> Result<(ChatRequest, String), PipelineError> {
        let request = ChatRequest::user(prompt, max_new_tokens);
        calls.0.fetch_add(1, Ordering::SeqCst);
        let out = complete_chat(self.backend.as_ref(), &request)?;
        Ok((request, out))
    }

    fn finish(rec: &mut TranslationRecord, raw: String) {
        rec.final_text = truncate_repeating_bigrams(&raw, DEFAULT_BIGRAM_THRESHOLD);
        rec.raw_output = raw;
    }

    fn zero_shot(&self, rec: &mut TranslationRecord, sentence: &str, calls: &Calls) -> Result<(), PipelineError> {
        let prompt = self.prompts.render_translate(&self.langs.tgt, &self.langs.src, sentence, &[])?;
        let (_, raw) = self.call(prompt, self.config.translate_max_tokens, calls)?;
        Self::finish(rec, raw);
        Ok(())
    }

    fn retrieve(&self, query: &str) -> Result<Vec<ScoredCandidate>, PipelineError> {
        let Some(retriever) = &self.retriever else {
            if self.pool.is_empty() {
                return Ok(Vec::new());
            }
            return Err(PipelineError::Config(format!(
                "retriever {:?} needs an explicitly supplied index",
                self.config.retriever
            )));
        };
        Ok(order_demonstrations(retriever.top_k(query, self.config.k)?))
    }

    fn demonstrations(&self, hits: &[ScoredCandidate]) -> Vec<Demonstration> {
        hits.iter()
            .filter_map(|h| self.pool.get(h.pool_id))
            .map(|p| Demonstration::new(p.source.clone(), p.target.clone()))
            .collect()
    }

    fn few_shot(&self, rec: &mut TranslationRecord, sentence: &str, calls: &Calls) -> Result<(), PipelineError> {
        let hits = self.retrieve(sentence)?;
        let demos = self.demonstrations(&hits);
        rec.k_effective = demos.len();
        rec.demos = hits;
        if demos.is_empty() {
            rec.fallbacks.push(Fallback::NoDemonstrations);
        }
        let prompt = self.prompts.render_translate(&self.langs.tgt, &self.langs.src, sentence, &demos)?;
        let (_, raw) = self.call(prompt, self.config.translate_max_tokens, calls)?;
        Self::finish(rec, raw);
        Ok(())
    }

    fn translate_phrase(&self, phrase: &str, calls: &Calls) -> Result<(PhraseTrace, Option<String>), PipelineError> {
        let hits = match self.config.phrase_translator {
            PhraseTranslator::LlmFewShot => self.retrieve(phrase)?,
            PhraseTranslator::ExternalMt => Vec::new(),
        };
        let mut warning = None;
        let raw = match self.config.phrase_translator {
            PhraseTranslator::LlmFewShot => {
                let demos = self.demonstrations(&hits);
                if demos.is_empty() {
                    warning = Some(format!("no demonstrations for phrase {phrase:?}; translated zero-shot"));
                }
                let prompt = self.prompts.render_translate(&self.langs.tgt, &self.langs.src, phrase, &demos)?;
                self.call(prompt, self.config.translate_max_tokens, calls)?.1
            }
            PhraseTranslator::ExternalMt => {
                let mt = self.external_mt.as_ref().expect("validated: endpoint present");
                mt.translate(phrase, &self.langs.src.code, &self.langs.tgt.code).map_err(PipelineError::ExternalMt)?
            }
        };
        let trace = PhraseTrace {
            phrase: phrase.to_string(),
            demo_ids: hits.iter().map(|h| h.pool_id).collect(),
            demo_scores: hits.iter().map(|h| h.score).collect(),
            raw_translation: raw.clone(),
            pair: PhrasePair::new(phrase, raw),
        };
        Ok((trace, warning))
    }

    fn comptra(&self, rec: &mut TranslationRecord, sentence: &str, calls: &Calls) -> Result<(), PipelineError> {
        let mut ctx = DecomposeContext::new(&self.prompts, &self.stopwords).with_backend(self.backend.as_ref());
        ctx.max_new_tokens = self.config.divide_max_tokens;
        if let Some(trees) = &self.trees {
            ctx = ctx.with_trees(trees);
        }
        let decomposition = decompose(rec.sentence_id, sentence, self.config.strategy, &ctx)?;
        calls.0.fetch_add(decomposition.llm_calls, Ordering::SeqCst);
        if decomposition.fallback {
            rec.fallbacks.push(Fallback::DecompositionFailed);
        }
        rec.warnings.extend(decomposition.warnings);
        let phrases = decomposition.phrase_set.phrases.clone();
        rec.phrase_set = Some(decomposition.phrase_set);

        // Results come back in phrase order whatever the completion order.
        let translated: Vec<(PhraseTrace, Option<String>)> =
            phrases.par_iter().map(|p| self.translate_phrase(p, calls)).collect::<Result<_, _>>()?;
        let mut traces = Vec::with_capacity(translated.len());
        for (trace, warning) in translated {
            rec.warnings.extend(warning);
            traces.push(trace);
        }
        let filtered = filter_phrase_pairs(traces.iter().map(|t| t.pair.clone()).collect(), &self.profile);
        for (trace, pair) in traces.iter_mut().zip(filtered) {
            trace.pair = pair;
        }
        let kept: Vec<Demonstration> = traces
            .iter()
            .filter(|t| t.pair.kept)
            .map(|t| Demonstration::new(t.pair.phrase.clone(), t.pair.translation.clone()))
            .collect();
        rec.k_effective = traces.iter().map(|t| t.demo_ids.len()).max().unwrap_or(0);
        rec.per_phrase = traces;

        if kept.is_empty() {
            rec.fallbacks.push(Fallback::NoKeptPairs);
            return self.zero_shot(rec, sentence, calls);
        }
        let prompt = self.prompts.render_merge(&self.langs.tgt, &self.langs.src, sentence, &kept)?;
        let (request, raw) = self.call(prompt, self.config.merge_max_tokens, calls)?;
        rec.merge_prompt_digest = Some(request.digest());
        Self::finish(rec, raw);
        Ok(())
    }

    fn ensemble(&self, rec: &mut TranslationRecord, sentence: &str, calls: &Calls) -> Result<(), PipelineError> {
        let scorer =
            self.scorer.as_ref().ok_or_else(|| PipelineError::Config("ensemble mode needs a quality scorer".into()))?;
        let mut few = TranslationRecord::new(rec.sentence_id, sentence, PipelineMode::FewShot);
        self.few_shot(&mut few, sentence, calls)?;
        self.comptra(rec, sentence, calls)?;
        let candidates = [Candidate::new("few_shot", &few.final_text), Candidate::new("comptra", &rec.final_text)];
        let selection = ensemble_select(&candidates, sentence, scorer.as_ref())?;
        rec.candidates = Some(
            candidates
                .iter()
                .zip(&selection.scores)
                .map(|(c, &score)| CandidateTrace { name: c.name.clone(), translation: c.translation.clone(), score })
                .collect(),
        );
        rec.demos = few.demos;
        rec.fallbacks.extend(few.fallbacks);
        if selection.chosen_index == 0 {
            rec.raw_output = few.raw_output;
            rec.final_text = few.final_text;
        }
        rec.chosen = Some(selection.chosen_name);
        Ok(())
    }
}
