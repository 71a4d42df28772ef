#include "w2i/templates.hpp"

#include "w2i/error.hpp"

namespace w2i::templates {

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size() + 256);
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        auto open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        auto close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) {
            throw TemplateError("unterminated placeholder in template");
        }
        out.append(tmpl.substr(pos, open - pos));
        std::string name(tmpl.substr(open + 2, close - open - 2));
        auto it = values.find(name);
        if (it == values.end()) throw TemplateError("no value for placeholder '" + name + "'");
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orchestrator
// ---------------------------------------------------------------------------

std::string_view orchestrator() {
    static constexpr std::string_view kText = R"TPL(You are an expert orchestrator for multimodal generation model.
Your job is to:
1. Analyze the provided image, prompt, scores, and optimization history.
2. Decide the most suitable generation task type: (This is in order of preference)
- text_image_to_image: Use a reference image + prompt for improved fidelity. (Most recommended)
- text_to_image: Generate image purely from text prompt.
- image_editing_with_prompt_and_reference: Modify the currently generated image according to the prompt and reference image.
- image_editing_with_prompt: Modify the currently generated image according to the prompt (inpainting, style transfer, attribute edit).

## Guidelines
- Image editing is the least recommended task type.
- You should only choose image editing if the generated image is very good and you are confident that the prompt is not enough to improve the image.

## Inputs
Original Prompt: {{original_prompt}}
Current Optimized Prompt: {{current_prompt}}
Detailed Scores: {{current_scores}}
Optimization History: {{optimization_history}}
Visual Analysis: {{visual_analysis}}

## Task Classification Rules
- text_to_image: Prompt is self-sufficient; no celebrity/IP likeness, no niche style, no need to preserve an existing image.
- text_image_to_image: Prompt includes niche entities (celebrity/IP/meme), rare styles, or ambiguous visuals → retrieve TWO references.
- image_editing_with_prompt: A previously generated image exists AND the new text indicates incremental change (style tweak, color, local edit) without needing a specific external reference.
- image_editing_with_prompt_and_reference: A previously generated image exists AND the new text implies matching a specific look/scene/face/style from a known IP or example → retrieve ONE reference.

### Disambiguation (text-only prompts that might be edits)
- If OPTIMIZATION_HISTORY shows a recent successful generation (e.g., within last step) and DETAILED_SCORES indicate high content alignment but style mismatch → prefer image_editing_with_prompt.
- If the text asks to match a specific world/IP/location/face (e.g., 'Shrek swamp', 'Monica's apartment', 'Van Gogh brushwork') → prefer image_editing_with_prompt_and_reference.
- If structural changes are large (pose/layout/object count), or prior image is low-quality/incorrect content → prefer text_image_to_image (with references if niche) or text_to_image.
- Reference needed should just be a simple keyword or a list of keywords.

## Strategy Selection
- text_to_image → ['prompt_optimizer']
- text_image_to_image → ['prompt_optimizer', 'image_retrieval']
- image_editing_with_prompt → ['prompt_optimizer']
- image_editing_with_prompt_and_reference → ['prompt_optimizer', 'image_retrieval']

## Output Format
Return a JSON object:
{
  "task_type": "text_to_image" | "text_image_to_image" | "image_editing_with_prompt" | "image_editing_with_prompt_and_reference",
  "strategies": ["prompt_optimizer", "image_retrieval"],
  "references_needed": ["reference_image_1", "reference_image_2"],
  "draft_prompt": "Draft prompt for the prompt optimizer to optimize with reference image index not _REF.",
  "reasoning": "Step-by-step reasoning why this task type and strategies were chosen.",
  "score_analysis": "Interpretation of each score and threshold violations.",
  "keyword_analysis": "Which keywords are crucial/missing and how they influence strategy choice.",
  "confidence": 0.0
}
Add "early_stop": true only when no further improvement is expected and the current image should be kept.

## Few-Shot Examples
### Example 1 (text_image_to_image; hard IP)
Prompt: 'Squid Game S3 teaser poster, Gi-hun in a rain-soaked street, neon green mask reflections'
Output:
{
  "task_type": "text_image_to_image",
  "strategies": ["prompt_optimizer", "image_retrieval"],
  "references_needed": ["squid game poster", "gi-hun"],
  "draft_prompt": "The poster based on image 1, a man from image 2 in a rain-soaked street, neon green mask reflections",
  "reasoning": "IP + character likeness + specific aesthetic → needs two references (Gi-hun, official poster style) to anchor identity and tone.",
  "score_analysis": "clip_score low; face_similarity target absent; style_consistency uncertain → retrieval to ground likeness/style.",
  "keyword_analysis": "'Squid Game', 'Gi-hun', 'neon mask' are niche; require grounding.",
  "confidence": 0.93
}

### Example 2 (text_to_image; generic but descriptive)
Prompt: 'Pixel art of a golden retriever surfing a giant wave at sunset'
Output:
{
  "task_type": "text_to_image",
  "strategies": ["prompt_optimizer"],
  "references_needed": [],
  "draft_prompt": "Pixel art of a golden retriever surfing a giant wave at sunset",
  "reasoning": "No niche entities; text fully specifies subject, action, style.",
  "score_analysis": "semantic_alignment expected adequate; no prior image constraints.",
  "keyword_analysis": "'pixel art', 'retriever', 'surfing', 'sunset' are common.",
  "confidence": 0.90
}

### Example 3 (image_editing_with_prompt; text-only prompt but edit prior image)
Context: A valid image was just generated (step t-1) of 'street portrait, female runner mid-stride'.
Prompt (text-only): 'Give it a 90s VHS sitcom vibe with warm halation and grain; keep the same pose and outfit'
Output:
{
  "task_type": "image_editing_with_prompt",
  "strategies": ["prompt_optimizer"],
  "references_needed": [],
  "draft_prompt": "Give it a 90s VHS sitcom vibe with warm halation and grain; keep the same pose and outfit",
  "reasoning": "Text suggests incremental style change to the most recent image while preserving pose/outfit. No specific external reference required.",
  "score_analysis": "prior_image_available=true; content_alignment_high=0.86; style_mismatch=0.41; edit_intent_detected=true → style-only edit is appropriate.",
  "keyword_analysis": "'90s VHS', 'grain', 'halation' are style modifiers without named IP → no retrieval.",
  "confidence": 0.95
}

### Example 4 (image_editing_with_prompt_and_reference; text-only prompt but needs IP/background match)
# The original image will always be image 1. And there will be only one reference image which is image 2.
# Only retrieve one reference image.
Context: A valid image was just generated (step t-1) of 'ogre-like character standing in a forest clearing'.
Prompt (text-only): 'Keep the current pose and lighting but move her to the Shrek swamp and match the movie's green tint and fog'
Output:
{
  "task_type": "image_editing_with_prompt_and_reference",
  "strategies": ["prompt_optimizer", "image_retrieval"],
  "references_needed": ["shrek"],
  "draft_prompt": "Keep the current pose and lighting but move her to the green ogre in image 1 and match the movie's green tint and fog",
  "reasoning": "User wants to retain existing composition but match a specific IP location and look. External visual target needed for accurate palette/props/fog.",
  "score_analysis": "prior_image_available=true; content_alignment_high=0.83; location_specificity='Shrek swamp'; style_target='movie's green tint' → requires one reference to lock scene aesthetics.",
  "keyword_analysis": "'Shrek swamp', 'movie's green tint', 'fog' → IP-scene keywords necessitate reference.",
  "confidence": 0.96
}
)TPL";
    return kText;
}

// ---------------------------------------------------------------------------
// Prompt optimizer
// ---------------------------------------------------------------------------

std::string_view prompt_optimizer() {
    static constexpr std::string_view kText = R"TPL(## Role
You are the Prompt Optimizer Agent. Rewrite the user's request into a clean, actionable instruction string for the selected task type.
Always produce a single JSON object with the following variables:
- A single string variable named prompt
- A negative_prompts comma-separated string

## Task Type
{{task_type}}

## Inputs
- ORIGINAL PROMPT: {{original_prompt}}
- CURRENT OPTIMIZED PROMPT: {{current_prompt}}
- VISUAL ANALYSIS: {{visual_analysis}}
- CURRENT SCORES: {{score_summary}}
- RECENT OPTIMIZATION HISTORY: {{history_block}}
- ORCHESTRATOR REASONING: {{reasoning}}

## Objectives
- Preserve essential subject(s), action/intent, and any crucial style/medium cues.
- If there are any unclear or ambiguous concepts that the image generator might not know try explaining them in the prompt.
- Clarify composition, lighting, lens/camera, time-of-day only when helpful.
- Keep wording compact, natural, and non-contradictory.
- Append concise negatives if artifacts are likely (e.g., 'no text artifacts, natural hands').
- If a concept is niche/ambiguous (celebrity, brand, rare object/place/style)
- Always refer to the reference image(s) with image index in the prompt for higher performance.

## Output Rules (Choose exactly one case based on task_type)
{{output_rules}}

## Style Heuristics
- Prioritize: Subject → Action/Intent → Composition → Lighting/Camera → Style/Medium.
- Use concrete, photography/film/art vocabulary over vague adjectives.
- Avoid contradictions (e.g., 'harsh noon sun' + 'soft night ambience').
- If scores/history imply distortions, add short negatives (hands, faces, watermarks, banding, text).

## Few Shot Examples
{{examples}}

Note: Emit exactly one case per call based on task type. No extra text outside the JSON object.
)TPL";
    return kText;
}

namespace {

constexpr std::string_view kRulesA = R"TPL(A) text_to_image
{
  "prompt": "<refined prompt string>",
  "negative_prompts": "term1, term2, term3"
}
Guidelines:
- One complete directive (Subject → Action/Intent → Composition → Lighting/Camera → Style/Medium).
- Rich but controlled descriptors; avoid long enumerations or conflicting specs.)TPL";

constexpr std::string_view kRulesB = R"TPL(B) text_image_to_image
{
  "prompt": "<composite instruction referencing the reference(s)>",
  "negative_prompts": "term1, term2, term3"
}
Guidelines:
- Assume the Image Retrieval Agent provides reference image(s) for the niche concept(s).
- Instruction should state the intended composition/edit/compositing with those references.
- For example 'Add the cat in image 1 to the background in image 2.'
- Always refer to the reference image(s) with image index in the prompt for higher performance.)TPL";

constexpr std::string_view kRulesC = R"TPL(C) image_editing_with_prompt
{
  "prompt": "<instruction to improve the current image>",
  "negative_prompts": "term1, term2, term3"
}
Guidelines for Image Editing:
- You're improving an EXISTING image to better match the SAME prompt
- Analyze what's wrong with current image (from scores/visual analysis)
- For prompt-only editing: focus on lighting, color, style, composition improvements
- For reference editing: identify specific elements that need external reference
- Keep the core subject/scene but improve quality/accuracy)TPL";

constexpr std::string_view kRulesD = R"TPL(D) image_editing_with_prompt_and_reference
{
  "prompt": "<instruction to improve using reference(s)>",
  "negative_prompts": "term1, term2, term3"
}
Guidelines for Image Editing:
- You're improving an EXISTING image to better match the SAME prompt
- Analyze what's wrong with current image (from scores/visual analysis)
- For prompt-only editing: focus on lighting, color, style, composition improvements
- For reference editing: identify specific elements that need external reference
- Keep the core subject/scene but improve quality/accuracy)TPL";

constexpr std::string_view kExamplesA = R"TPL(### Case A: text_to_image
Original prompt: 'Sunrise garden macro photography'
{
  "prompt": "The sun rises slightly; clear dew on rose petals; a crystal ladybug crawls toward a dew bead; early-morning garden backdrop; macro lens.",
  "negative_prompts": "(((deformed))), blurry, over saturation, bad anatomy, disfigured, poorly drawn face, mutation, mutated, (extra_limb), (ugly), (poorly drawn hands), fused fingers, messy drawing, broken legs censor, censored, censor_bar"
})TPL";

constexpr std::string_view kExamplesB = R"TPL(### Case B1: text_image_to_image
Original prompt: 'Dr Strange in backroom'
{
  "prompt": "Compose a scene with the character (Dr Strange) from image 1 standing in a dim, fluorescent 'backrooms' corridor from image 2; center-frame, medium shot; flat overhead lighting, subtle fog; emphasize iconic outfit and cape motion.",
  "negative_prompts": "text artifacts, over-smoothing, waxy skin, warped hands, banding"
}

### Case B2: text_image_to_image
Original prompt: 'A kid's toy in a parking lot.'
{
  "prompt": "Place the toy from image 1 into the hands of the person in image 2 in a parking-lot setting; align scale and grip; match lighting direction and color temperature.",
  "negative_prompts": "(((deformed))), blurry, over saturation, bad anatomy, disfigured, poorly drawn face, mutation, mutated, (extra_limb), (ugly), (poorly drawn hands), fused fingers, messy drawing, broken legs censor, censored, censor_bar"
})TPL";

constexpr std::string_view kExamplesC = R"TPL(### Case C: image_editing_with_prompt
Original prompt: 'Dr Strange in backroom'
Current image issues: Low lighting quality, poor color balance
{
  "prompt": "Improve the lighting and color balance of the current character (Dr Strange) in backroom scene; enhance contrast and fix dim areas; maintain character pose and backroom atmosphere",
  "negative_prompts": "overexposure, harsh shadows, color banding, washed out colors"
})TPL";

constexpr std::string_view kExamplesD = R"TPL(### Case D: image_editing_with_prompt_and_reference
Original prompt: 'Dr Strange in backroom'
Current image issues: Character face doesn't look like Dr Strange
{
  "prompt": "Fix the character's face in the current backroom scene to match image 2 (character (Dr Strange)); maintain the existing pose and backroom setting in image 1; improve facial accuracy",
  "negative_prompts": "wrong face, generic face, blurry features, face artifacts"
})TPL";

}  // namespace

std::string_view prompt_optimizer_rules(TaskType type) {
    switch (type) {
        case TaskType::text_to_image: return kRulesA;
        case TaskType::text_image_to_image: return kRulesB;
        case TaskType::image_editing_with_prompt: return kRulesC;
        case TaskType::image_editing_with_prompt_and_reference: return kRulesD;
    }
    return kRulesA;
}

std::string_view prompt_optimizer_examples(TaskType type) {
    switch (type) {
        case TaskType::text_to_image: return kExamplesA;
        case TaskType::text_image_to_image: return kExamplesB;
        case TaskType::image_editing_with_prompt: return kExamplesC;
        case TaskType::image_editing_with_prompt_and_reference: return kExamplesD;
    }
    return kExamplesA;
}

// ---------------------------------------------------------------------------
// Image retrieval
// ---------------------------------------------------------------------------

std::string_view retriever_selector() {
    static constexpr std::string_view kText = R"TPL(You are an expert visual analyst evaluating reference images for text-to-image generation.

CONTEXT:
- Original prompt: {{original_prompt}}
- Search query: {{query}}
- Category: {{category}}
- Purpose: Select the best reference images to guide AI image generation.
- You must select at least one image.

TASK:
Analyze each provided image and evaluate how well it matches the search query and would help generate the target prompt.
The candidate images are attached in order; image_index 0 is the first attachment.

For {{category}} category:
- CONTENT: Look for objects, people, locations, compositions that match the query
- STYLE: Look for artistic styles, visual aesthetics, color palettes, techniques
- CONTEXT: Look for environmental context, mood, atmosphere, setting details

EVALUATION CRITERIA:
1. Query Match: How well does the image match the specific search query?
2. Visual Quality: Is the image clear, well-composed, and visually appealing?
3. Usefulness: Would this image provide good visual guidance for AI generation?
4. Distinctiveness: Does it offer unique visual information not found in other candidates?

INSTRUCTIONS:
- Rate each image from 0.0 to 1.0 (higher = better)
- Select up to {{max_selections}} best images
- Provide brief reasoning for each selection

Respond with ONLY a JSON object in the following format (this is an example):
{
  "selections": [
    {
      "image_index": 0,
      "score": 0.85,
      "reasoning": "Excellent match for query, high visual quality, provides clear guidance"
    },
    {
      "image_index": 1,
      "score": 0.72,
      "reasoning": "Good secondary option with different angle/perspective"
    }
  ]
}

Only include images you would actually select (score >= 0.6).
If you are not sure about the images, you can select multiple images. Low scores are allowed.
)TPL";
    return kText;
}

std::string_view query_rewriter() {
    static constexpr std::string_view kText = R"TPL(You are an expert at creating image search queries. A search query failed to return any images from an image search API.

CONTEXT:
- Original text prompt: '{{original_prompt}}'
- Failed search query: '{{failed_query}}'
- Goal: Find reference images to help generate the target prompt

TASK:
Create a better, more searchable query that is likely to return relevant images.
Consider:
- Simplify complex terms: Replace uncommon/specific terms with more common alternatives
- Add descriptive keywords: Include visual descriptors that would help find relevant images
- Use popular terms: Replace niche concepts with mainstream equivalents
- Consider synonyms: Use alternative words that mean the same thing
- Focus on visual elements: Emphasize what the image should look like rather than abstract concepts

EXAMPLES:
- "Dr Strange" → "Marvel superhero with cape" or "sorcerer with magic"
- "backroom" → "yellow fluorescent office space" or "liminal empty rooms"
- "cyberpunk hacker" → "futuristic computer user neon lights"
- "medieval knight" → "armored warrior with sword"

Respond with ONLY the modified search query, nothing else. Make it 2-6 words that would likely return relevant images.
)TPL";
    return kText;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

std::string_view visual_analysis() {
    static constexpr std::string_view kText = R"TPL(You are an expert at analyzing images and detecting AI-generated artifacts. Provide concise, focused analysis.
Analyze this image and compare it with the text: '{{prompt}}'.
Focus on:
1) What the text describes well vs. what it misses
2) Any hallucinations or distorted details that don't match the prompt.
3) Any elements that are not shown in the text but should be added.
4) Visual enhancements for better generation quality
Be specific about enhancement opportunities that don't conflict with the original intent.
)TPL";
    return kText;
}

std::string_view grader() {
    static constexpr std::string_view kText = R"TPL(You are a multimodal large-language model tasked with evaluating images generated by a text-to-image model. Your goal is to assess each generated image based on specific aspects and provide a detailed critique, along with a scoring system. The final output should be formatted as a JSON object containing individual scores for each aspect and an overall score.

1. Key Evaluation Aspects and Scoring Criteria:
For each aspect, provide a score from 0 to 10 (0 = poor, 10 = excellent) and a short justification (1-2 sentences).
- Accuracy to Prompt – Assess how well the image matches the prompt: elements, objects, and setting.
- Creativity and Originality – Judge whether the image shows imagination beyond a literal interpretation.
- Visual Quality and Realism – Evaluate resolution, detail, lighting, shading, and perspective.
- Consistency and Cohesion – Check whether all elements are coherent and free from anomalies.
- Emotional or Thematic Resonance – Assess whether the image conveys the intended mood or tone.

2. Overall Score:
Provide an overall score as a weighted or simple average of all aspects.

Please evaluate the following image based on the prompt: "{{prompt}}"

Respond with a JSON object in this exact format:
{
    "accuracy_to_prompt": {
        "score": <0-10>,
        "explanation": "<1-2 sentence explanation>"
    },
    "creativity_and_originality": {
        "score": <0-10>,
        "explanation": "<1-2 sentence explanation>"
    },
    "visual_quality_and_realism": {
        "score": <0-10>,
        "explanation": "<1-2 sentence explanation>"
    },
    "consistency_and_cohesion": {
        "score": <0-10>,
        "explanation": "<1-2 sentence explanation>"
    },
    "emotional_or_thematic_resonance": {
        "score": <0-10>,
        "explanation": "<1-2 sentence explanation>"
    },
    "overall_score": <0-10>
}
)TPL";
    return kText;
}

std::string_view keyword_extractor() {
    static constexpr std::string_view kText = R"TPL(You are building the checklist of required concepts used to judge a generated image against its prompt.

Prompt: "{{prompt}}"
Candidate keywords from rule-based parsing: {{candidates}}
Reference descriptors: {{descriptors}}

Merge synonyms and prune redundant or purely grammatical candidates. Keep entities, attributes, relations, styles and constraints (for example character name, location, palette, era, camera). Mark a keyword as critical when the image clearly fails the prompt without it.

Respond with ONLY a JSON object:
{
  "keywords": [
    {"text": "<keyword>", "critical": true}
  ]
}
)TPL";
    return kText;
}

std::string_view keyword_grader() {
    static constexpr std::string_view kText = R"TPL(You are judging whether a generated image covers the required concepts of its prompt.
The first attached image is the generated image. Any further attachments are the reference images it was conditioned on, in order.

Prompt: "{{prompt}}"
References: {{references}}
Visual analysis of the generated image: {{visual_analysis}}

Keywords:
{{keywords}}

For every keyword decide whether it is "present", "partially present" or "missing" in the generated image and give a short rationale.

Respond with ONLY a JSON object:
{
  "judgments": [
    {"keyword": "<keyword>", "grade": "present", "rationale": "<short reason>"}
  ]
}
)TPL";
    return kText;
}

}  // namespace w2i::templates
