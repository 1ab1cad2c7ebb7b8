//! Deterministic stand-in for an LLM that "translates" English into
//! pseudo-Amharic by mapping each Latin letter onto an Ethiopic syllable.
#![allow(dead_code)]

/// Letter-by-letter transliteration; digits, spaces and punctuation pass through.
pub fn transliterate(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c.is_ascii_alphabetic() {
                let idx = (c.to_ascii_lowercase() as u32) - ('a' as u32);
                char::from_u32(0x1200 + idx * 8).unwrap()
            } else {
                c
            }
        })
        .collect()
}

/// Text between the last "sentence\n\n" and "\n\nPlease make sure".
pub fn translate_prompt_sentence(prompt: &str) -> Option<&str> {
    let start = prompt.rfind(" sentence\n\n")? + " sentence\n\n".len();
    let end = prompt[start..].find("\n\nPlease make sure")? + start;
    Some(&prompt[start..end])
}

/// Splits on ", " and " and " into a numbered list. Sentences without either
/// get a prose reply, which the parser rejects.
pub fn divide(sentence: &str) -> String {
    let parts: Vec<String> = sentence
        .split(", ")
        .flat_map(|p| p.split(" and "))
        .map(|p| p.trim().trim_end_matches('.').to_string())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.len() < 2 {
        return "This sentence is already simple.".to_string();
    }
    parts.iter().enumerate().map(|(i, p)| format!("    {}. {}.", i + 1, p)).collect::<Vec<_>>().join("\n")
}

/// Answers divide prompts with [`divide`] and translation prompts with
/// [`transliterate`]. Phrases containing a digit come back untranslated.
pub fn respond(prompt: &str) -> String {
    if prompt.contains("\nPropositions\n") {
        let sentence = prompt.rsplit("Sentence\n").next().unwrap_or("").trim();
        return divide(sentence);
    }
    match translate_prompt_sentence(prompt) {
        Some(s) if s.chars().any(|c| c.is_ascii_digit()) => s.to_string(),
        Some(s) => transliterate(s),
        None => String::new(),
    }
}

pub const POOL_SOURCES: &[&str] = &[
    "The market opens early in the morning.",
    "My brother works at the hospital.",
    "The rain stopped after two hours.",
    "She bought bread and milk.",
    "The children play football in the park.",
    "We visited the old church last year.",
    "The teacher wrote the lesson on the board.",
    "Farmers need rain for their crops.",
    "The road to the city is long.",
    "He reads the newspaper every day.",
    "The river flows through the valley.",
    "Coffee is an important export.",
    "The bus was late this morning.",
    "Doctors recommend drinking clean water.",
    "The festival attracts many visitors.",
    "Her grandmother tells old stories.",
    "The school received new books.",
    "Prices rose sharply last month.",
    "The museum is closed on Mondays.",
    "They built a new bridge over the river.",
    "The government announced new rules.",
    "Students study hard before exams.",
    "The mountain is covered with snow.",
    "The shop sells fresh fruit.",
    "A strong wind damaged the roof.",
    "The library lends books for free.",
    "The city council met on Tuesday.",
    "Many people travel during the holidays.",
    "The company hired new workers.",
    "The baby slept through the night.",
];

pub const EVAL_SOURCES: &[&str] = &[
    "The market was busy, and the prices were high.",
    "My sister visited the museum, then she went to the library.",
    "The children walked to school.",
    "Heavy rain fell in the valley, the river flooded the road, and farmers lost their crops.",
    "The teacher praised the students and gave them new books.",
    "In 2019, the company opened a new shop.",
    "The doctor arrived late, but the patients waited.",
    "Coffee farmers sell their beans at the market.",
    "The bridge was old, and the council decided to build a new one.",
    "Visitors enjoyed the festival, the music and the food.",
];
