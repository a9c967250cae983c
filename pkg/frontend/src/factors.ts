/** The fixed ideation vocabulary shown by the factor pickers.
 *
 * The service validates selections authoritatively; this copy only
 * populates the controls. The design space is a stable contract, so the
 * lists are constants rather than a fetch.
 */

export const FACTOR_TYPES: Record<string, string[]> = {
  Function: [
    "Witchcraft Belief",
    "Indigenous Belief",
    "Religious Belief",
    "Cultural Dissemination",
    "Interpersonal Communication",
    "Festive Atmosphere Evoking",
    "Daily Decoration",
  ],
  "Subject Matter": [
    "Primitive Paper-cutting",
    "Flora and Fauna",
    "Landscape",
    "Historical Figure and Story",
    "Folk Life",
    "Contemporary Subject",
  ],
  Style: ["Abstract", "Realistic"],
  "Method of Expression": ["Metaphor", "Symbolism", "Homophony"],
};

export const FACTOR_NAMES = Object.keys(FACTOR_TYPES);
