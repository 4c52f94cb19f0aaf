/** Shapes exchanged with the rating service API. */

export interface AnnotationTask {
  example_id: string;
  context: string;
  output_text: string;
  instructions_version: string;
}

export interface TaskBatch {
  batch_id: string;
  rater_id: string;
  tasks: AnnotationTask[];
}

export interface BatchResponse {
  batch: TaskBatch | null;
  done: boolean;
}

export interface RatingAck {
  status: string;
  example_id: string;
  count: number;
}

export interface Progress {
  examples_total: number;
  fully_rated: number;
  ratings_total: number;
  replicate_target: number;
  per_example: Record<string, number>;
}

export interface Instructions {
  version: string;
  text: string;
}

/** The six selectable scores with their anchor labels. */
export const RATING_CHOICES: ReadonlyArray<{ score: number; label: string }> = [
  { score: 0, label: "invalid (grammatically or factually incorrect)" },
  { score: 1, label: "very atypical" },
  { score: 2, label: "atypical" },
  { score: 3, label: "neutral" },
  { score: 4, label: "typical" },
  { score: 5, label: "very typical" },
];
