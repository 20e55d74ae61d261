export class FormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FormatError";
  }
}

export class IntegrityError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "IntegrityError";
  }
}

/** Produced dims disagree with the recipe's expected dims, or raw data is unusable. */
export class RecipeError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "RecipeError";
  }
}

/** Dataset requires an explicit ethics acknowledgment before reuse. */
export class EthicsError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EthicsError";
  }
}
