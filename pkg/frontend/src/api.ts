export interface Candidate {
  label: string;
  class_id: number;
  probability: number;
}

export interface RecognizeResponse {
  candidates: Candidate[];
  timings: { preprocess_ms: number; forward_ms: number; total_ms: number };
}

export interface FeatureMapsResponse {
  stroke_count: number;
  size: number;
  max_strokes: number;
  stack: number[][][];
  dirs: number[];
}

export interface ModelInfo {
  variant: string;
  class_count: number;
  alphabet_size: number;
  checkpoint_hash: string | null;
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

type FetchLike = typeof fetch;

/** Thin typed client over the recognition service. */
export class RecognitionClient {
  constructor(
    private readonly base = "",
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.base}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(`service unreachable: ${String(err)}`, 0);
    }
    if (!response.ok) {
      throw new ApiError(`${path} failed with ${response.status}`, response.status);
    }
    try {
      return (await response.json()) as T;
    } catch (err) {
      throw new ApiError(`malformed response from ${path}`, response.status);
    }
  }

  recognize(strokes: number[][][], k: number): Promise<RecognizeResponse> {
    return this.post<RecognizeResponse>("/api/recognize", { strokes, k });
  }

  featureMaps(strokes: number[][][]): Promise<FeatureMapsResponse> {
    return this.post<FeatureMapsResponse>("/api/featuremaps", { strokes, k: 1 });
  }

  async modelInfo(): Promise<ModelInfo> {
    const response = await this.fetchImpl(`${this.base}/api/model`);
    if (!response.ok) throw new ApiError("model info failed", response.status);
    return (await response.json()) as ModelInfo;
  }
}
