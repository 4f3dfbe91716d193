"""Prompt templates for readability-targeted paraphrase generation.

Each target is the reading-ease score the paraphrase should land near;
one paraphrase is requested per selected level.
"""

PARAPHRASE_PROMPTS: dict[int, str] = {
    5: (
        "Paraphrase this document for a professional. It should be extremely "
        "difficult to read and best understood by university graduates."
    ),
    20: (
        "Paraphrase this document for college graduate level (US). It should be "
        "very difficult to read and best understood by university graduates."
    ),
    40: "Paraphrase this document for college level (US). It should be difficult to read.",
    55: (
        "Paraphrase this document for 10th-12th grade school level (US). "
        "It should be fairly difficult to read."
    ),
    65: (
        "Paraphrase this document for 8th/9th grade school level (US). It should be "
        "plain English and easily understood by 13- to 15-year-old students."
    ),
    75: "Paraphrase this document for 7th grade school level (US). It should be fairly easy to read.",
    85: "Paraphrase this document for 6th grade school level (US). It should be easy to read.",
    95: (
        "Paraphrase this document for 5th grade school level (US). It should be very "
        "easy to read and easily understood by an average 11-year old student."
    ),
}

TARGET_LEVELS: tuple[int, ...] = tuple(sorted(PARAPHRASE_PROMPTS))
