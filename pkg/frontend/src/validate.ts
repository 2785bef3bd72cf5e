/** Client-side filter validation: bad ranges never reach the API. */

export function parseInstant(text: string): Date | null {
  if (!/^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}(:\d{2})?(\.\d+)?(Z|[+-]\d{2}:\d{2})$/.test(text)) {
    return null;
  }
  const date = new Date(text);
  return Number.isNaN(date.getTime()) ? null : date;
}

/**
 * Returns a human-readable problem with the (from, to) pair, or null when
 * the range is acceptable.  Either bound may be omitted.
 */
export function validateRange(from?: string, to?: string): string | null {
  let fromDate: Date | null = null;
  let toDate: Date | null = null;
  if (from !== undefined && from !== "") {
    fromDate = parseInstant(from);
    if (fromDate === null) return `not a valid timestamp: ${from}`;
  }
  if (to !== undefined && to !== "") {
    toDate = parseInstant(to);
    if (toDate === null) return `not a valid timestamp: ${to}`;
  }
  if (fromDate !== null && toDate !== null && fromDate.getTime() >= toDate.getTime()) {
    return "'from' must be strictly before 'to'";
  }
  return null;
}
